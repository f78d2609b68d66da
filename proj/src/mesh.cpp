#include "crfv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <tuple>

namespace crfv {

namespace {

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

struct FaceEntry {
  std::array<int, 3> key;
  int element;
  int local;
};

}  // namespace

int TetMesh::across(int k, int local_face) const {
  const Face& f = face(element_faces(k)[static_cast<std::size_t>(local_face)]);
  if (f.is_boundary()) return -1;
  return f.owner == k ? f.neighbor : f.owner;
}

std::array<double, 4> TetMesh::barycentric(int k, const Vec3& x) const {
  const auto& t = tets_[static_cast<std::size_t>(k)];
  const Vec3 l = inverse_jacobian_[static_cast<std::size_t>(k)] * (x - vertices_[static_cast<std::size_t>(t[0])]);
  return {1.0 - l.sum(), l[0], l[1], l[2]};
}

Vec3 TetMesh::point(int k, const std::array<double, 4>& lambda) const {
  const auto& t = tets_[static_cast<std::size_t>(k)];
  Vec3 x = Vec3::Zero();
  for (std::size_t i = 0; i < 4; ++i) x += lambda[i] * vertices_[static_cast<std::size_t>(t[i])];
  return x;
}

std::array<Vec3, 3> TetMesh::face_corners(int f) const {
  const auto& v = face(f).vertices;
  return {vertices_[static_cast<std::size_t>(v[0])], vertices_[static_cast<std::size_t>(v[1])],
          vertices_[static_cast<std::size_t>(v[2])]};
}

TetMesh build_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets) {
  TetMesh m;
  const int nv = static_cast<int>(vertices.size());
  if (tets.empty()) throw MeshError("mesh has no elements");

  double extent = 0.0;
  for (const auto& v : vertices) extent = std::max(extent, v.cwiseAbs().maxCoeff());
  extent = std::max(extent, 1e-300);

  for (std::size_t k = 0; k < tets.size(); ++k) {
    auto& t = tets[k];
    for (int i : t) {
      if (i < 0 || i >= nv) {
        throw MeshError("element " + std::to_string(k) + " references vertex " + std::to_string(i) +
                        " outside [0, " + std::to_string(nv) + ")");
      }
    }
    double vol = signed_volume(vertices[static_cast<std::size_t>(t[0])], vertices[static_cast<std::size_t>(t[1])],
                               vertices[static_cast<std::size_t>(t[2])], vertices[static_cast<std::size_t>(t[3])]);
    if (std::abs(vol) <= 1e-14 * extent * extent * extent) {
      throw MeshError("degenerate input: element " + std::to_string(k) + " has zero volume");
    }
    if (vol < 0) std::swap(t[2], t[3]);
  }

  m.vertices_ = std::move(vertices);
  m.tets_ = std::move(tets);
  const std::size_t ne = m.tets_.size();

  m.volume_.resize(ne);
  m.barycenter_.resize(ne);
  m.diameter_.resize(ne);
  m.inradius_.resize(ne);
  m.inverse_jacobian_.resize(ne);
  m.element_faces_.resize(ne);
  m.element_face_sign_.resize(ne);

  std::vector<FaceEntry> entries;
  entries.reserve(4 * ne);
  for (std::size_t k = 0; k < ne; ++k) {
    const auto& t = m.tets_[k];
    std::array<Vec3, 4> x;
    for (std::size_t i = 0; i < 4; ++i) x[i] = m.vertices_[static_cast<std::size_t>(t[i])];
    m.volume_[k] = signed_volume(x[0], x[1], x[2], x[3]);
    m.barycenter_[k] = 0.25 * (x[0] + x[1] + x[2] + x[3]);
    double diam = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) diam = std::max(diam, (x[i] - x[j]).norm());
    m.diameter_[k] = diam;
    Mat3 jac;
    jac.col(0) = x[1] - x[0];
    jac.col(1) = x[2] - x[0];
    jac.col(2) = x[3] - x[0];
    m.inverse_jacobian_[k] = jac.inverse();
    for (int i = 0; i < 4; ++i) {
      std::array<int, 3> key{};
      int c = 0;
      for (int j = 0; j < 4; ++j)
        if (j != i) key[static_cast<std::size_t>(c++)] = t[static_cast<std::size_t>(j)];
      std::sort(key.begin(), key.end());
      entries.push_back({key, static_cast<int>(k), i});
    }
  }

  std::sort(entries.begin(), entries.end(), [](const FaceEntry& a, const FaceEntry& b) {
    return std::tie(a.key, a.element) < std::tie(b.key, b.element);
  });

  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    while (j < entries.size() && entries[j].key == entries[i].key) ++j;
    if (j - i > 2) {
      throw MeshError("malformed connectivity: face shared by " + std::to_string(j - i) + " elements");
    }
    Face f;
    f.vertices = entries[i].key;
    f.owner = entries[i].element;
    f.neighbor = (j - i == 2) ? entries[i + 1].element : -1;
    const Vec3& a = m.vertices_[static_cast<std::size_t>(f.vertices[0])];
    const Vec3& b = m.vertices_[static_cast<std::size_t>(f.vertices[1])];
    const Vec3& c = m.vertices_[static_cast<std::size_t>(f.vertices[2])];
    Vec3 n = (b - a).cross(c - a);
    f.area = 0.5 * n.norm();
    n.normalize();
    f.barycenter = (a + b + c) / 3.0;
    if (n.dot(f.barycenter - m.barycenter_[static_cast<std::size_t>(f.owner)]) < 0) n = -n;
    f.normal = n;
    const int fid = static_cast<int>(m.faces_.size());
    for (std::size_t e = i; e < j; ++e) {
      const auto k = static_cast<std::size_t>(entries[e].element);
      const auto l = static_cast<std::size_t>(entries[e].local);
      m.element_faces_[k][l] = fid;
      m.element_face_sign_[k][l] = (entries[e].element == f.owner) ? 1.0 : -1.0;
    }
    m.faces_.push_back(f);
    i = j;
  }

  m.interior_index_.assign(m.faces_.size(), -1);
  for (std::size_t f = 0; f < m.faces_.size(); ++f) {
    if (m.faces_[f].is_boundary()) {
      m.boundary_faces_.push_back(static_cast<int>(f));
    } else {
      m.interior_index_[f] = static_cast<int>(m.interior_faces_.size());
      m.interior_faces_.push_back(static_cast<int>(f));
    }
  }

  m.h_ = 0.0;
  m.hfrak_ = std::numeric_limits<double>::infinity();
  m.total_volume_ = 0.0;
  for (std::size_t k = 0; k < ne; ++k) {
    double surface = 0.0;
    for (int fid : m.element_faces_[k]) surface += m.faces_[static_cast<std::size_t>(fid)].area;
    m.inradius_[k] = 3.0 * m.volume_[k] / surface;
    m.h_ = std::max(m.h_, m.diameter_[k]);
    m.hfrak_ = std::min(m.hfrak_, m.inradius_[k]);
    m.total_volume_ += m.volume_[k];
  }
  return m;
}

TetMesh structured_box_mesh(int nx, int ny, int nz, const Box& box) {
  if (nx < 1 || ny < 1 || nz < 1) throw MeshError("box mesh needs at least one cell per direction");
  const auto idx = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };
  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1) * (nz + 1)));
  const Vec3 d = (box.hi - box.lo).cwiseQuotient(Vec3(nx, ny, nz));
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) vertices.emplace_back(box.lo + Vec3(i * d[0], j * d[1], k * d[2]));

  // Kuhn split: one tet per monotone lattice path from corner (0,0,0) to (1,1,1).
  static constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<std::array<int, 4>> tets;
  tets.reserve(static_cast<std::size_t>(6 * nx * ny * nz));
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        for (const auto& p : perms) {
          std::array<int, 3> c{i, j, k};
          std::array<int, 4> t{};
          t[0] = idx(c[0], c[1], c[2]);
          for (std::size_t s = 0; s < 3; ++s) {
            ++c[static_cast<std::size_t>(p[s])];
            t[s + 1] = idx(c[0], c[1], c[2]);
          }
          tets.push_back(t);
        }
  return build_mesh(std::move(vertices), std::move(tets));
}

namespace {

// Reads the next non-comment, non-empty line.
bool next_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TetMesh read_mesh(std::istream& in) {
  std::string line;
  int lineno = 0;
  if (!next_line(in, line, lineno)) throw MeshError("mesh: missing header line");
  long nv = 0, nt = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> nv >> nt) || nv < 4 || nt < 1)
      throw MeshError("mesh line " + std::to_string(lineno) + ": expected \"nv nt\"");
  }
  std::vector<Vec3> vertices(static_cast<std::size_t>(nv));
  for (auto& v : vertices) {
    if (!next_line(in, line, lineno)) throw MeshError("mesh: unexpected end of file in vertex block");
    std::istringstream ss(line);
    if (!(ss >> v[0] >> v[1] >> v[2]))
      throw MeshError("mesh line " + std::to_string(lineno) + ": expected 3 coordinates");
  }
  std::vector<std::array<int, 4>> tets(static_cast<std::size_t>(nt));
  for (auto& t : tets) {
    if (!next_line(in, line, lineno)) throw MeshError("mesh: unexpected end of file in element block");
    std::istringstream ss(line);
    if (!(ss >> t[0] >> t[1] >> t[2] >> t[3]))
      throw MeshError("mesh line " + std::to_string(lineno) + ": expected 4 vertex indices");
  }
  return build_mesh(std::move(vertices), std::move(tets));
}

TetMesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const TetMesh& mesh) {
  out << mesh.num_vertices() << ' ' << mesh.num_elements() << '\n';
  out.precision(17);
  for (const auto& v : mesh.vertices()) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  for (const auto& t : mesh.tets()) out << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
}

}  // namespace crfv
