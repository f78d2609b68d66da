#pragma once

#include "crfv/types.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace crfv {

/// Triangular face of a tetrahedral mesh.
///
/// The face normal is fixed once: for a boundary face it is the outer normal of the
/// domain, for an interior face it points out of `owner`, which is always the element
/// with the lower id. Traces are therefore g^- = g_owner and g^+ = g_neighbor.
struct Face {
  std::array<int, 3> vertices{};  // sorted ascending; the face identity
  double area = 0.0;
  Vec3 normal = Vec3::Zero();
  Vec3 barycenter = Vec3::Zero();
  int owner = -1;
  int neighbor = -1;  // -1 on the boundary

  bool is_boundary() const noexcept { return neighbor < 0; }
};

/// Admissible conforming tetrahedral mesh with face adjacency and geometry.
///
/// Immutable after construction. Element `k` has local faces `element_faces(k)[i]`,
/// where local face i is opposite to local vertex i.
class TetMesh {
 public:
  TetMesh() = default;

  std::size_t num_vertices() const noexcept { return vertices_.size(); }
  std::size_t num_elements() const noexcept { return tets_.size(); }
  std::size_t num_faces() const noexcept { return faces_.size(); }

  const std::vector<Vec3>& vertices() const noexcept { return vertices_; }
  const std::vector<std::array<int, 4>>& tets() const noexcept { return tets_; }
  const std::vector<Face>& faces() const noexcept { return faces_; }
  const Face& face(int f) const { return faces_[static_cast<std::size_t>(f)]; }

  const std::array<int, 4>& element_faces(int k) const {
    return element_faces_[static_cast<std::size_t>(k)];
  }
  /// +1 if element k owns face `f` (so n_{f,k} = n_f), -1 otherwise.
  double orientation(int k, int local_face) const {
    return element_face_sign_[static_cast<std::size_t>(k)][static_cast<std::size_t>(local_face)];
  }
  /// Outward unit normal n_{sigma,K} of local face i of element k.
  Vec3 outward_normal(int k, int local_face) const {
    return orientation(k, local_face) * face(element_faces(k)[static_cast<std::size_t>(local_face)]).normal;
  }
  /// The element across local face i of k, or -1 on the boundary.
  int across(int k, int local_face) const;

  double volume(int k) const { return volume_[static_cast<std::size_t>(k)]; }
  const Vec3& barycenter(int k) const { return barycenter_[static_cast<std::size_t>(k)]; }
  double diameter(int k) const { return diameter_[static_cast<std::size_t>(k)]; }
  double inradius(int k) const { return inradius_[static_cast<std::size_t>(k)]; }

  /// h = max diameter.
  double h() const noexcept { return h_; }
  /// Smallest inradius.
  double inradius_min() const noexcept { return hfrak_; }
  double shape_ratio() const noexcept { return h_ / hfrak_; }
  double total_volume() const noexcept { return total_volume_; }

  std::span<const int> interior_faces() const noexcept { return interior_faces_; }
  std::span<const int> boundary_faces() const noexcept { return boundary_faces_; }

  /// Index of face f among interior faces, or -1 for boundary faces.
  int interior_index(int f) const { return interior_index_[static_cast<std::size_t>(f)]; }

  /// Barycentric coordinates of point x with respect to element k.
  std::array<double, 4> barycentric(int k, const Vec3& x) const;
  /// Point with the given barycentric coordinates in element k.
  Vec3 point(int k, const std::array<double, 4>& lambda) const;
  /// Corner coordinates of face f.
  std::array<Vec3, 3> face_corners(int f) const;

  friend TetMesh build_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets);

 private:
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 4>> tets_;
  std::vector<Face> faces_;
  std::vector<std::array<int, 4>> element_faces_;
  std::vector<std::array<double, 4>> element_face_sign_;
  std::vector<double> volume_;
  std::vector<Vec3> barycenter_;
  std::vector<double> diameter_;
  std::vector<double> inradius_;
  std::vector<int> interior_faces_;
  std::vector<int> boundary_faces_;
  std::vector<int> interior_index_;
  std::vector<Mat3> inverse_jacobian_;
  double h_ = 0.0;
  double hfrak_ = 0.0;
  double total_volume_ = 0.0;
};

/// Builds adjacency and geometry. Negatively oriented tets are flipped.
/// Throws MeshError on invalid indices, zero-volume tets, or a face shared by more than two tets.
TetMesh build_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets);

struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();
};

/// Conforming Kuhn triangulation of an axis-aligned box: every cell split into 6 tets
/// around its main diagonal.
TetMesh structured_box_mesh(int nx, int ny, int nz, const Box& box = {});

enum class BoundaryKind : std::uint8_t { Interior, Inflow, Outflow };

/// Partition of the boundary faces by the sign of the face-mean normal boundary velocity.
/// Zero normal velocity counts as outflow.
struct BoundaryClassification {
  std::vector<int> inflow;
  std::vector<int> outflow;
  std::vector<BoundaryKind> kind;  // per face
  /// Boundary faces where the affine boundary velocity changes sign between the vertices.
  std::vector<int> mixed_sign_faces;

  bool is_inflow(int f) const { return kind[static_cast<std::size_t>(f)] == BoundaryKind::Inflow; }
  bool is_outflow(int f) const { return kind[static_cast<std::size_t>(f)] == BoundaryKind::Outflow; }
};

class CRVecField;
BoundaryClassification classify_boundary(const TetMesh& mesh, const CRVecField& u_boundary);

/// Plain-text mesh format: "nv nt", nv coordinate lines, nt lines of 4 zero-based indices.
/// '#' starts a comment.
TetMesh read_mesh(std::istream& in);
TetMesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const TetMesh& mesh);

}  // namespace crfv
