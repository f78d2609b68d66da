#include "crfv/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crfv {

QField::QField(const TetMesh& mesh, std::vector<double> values) : mesh_(&mesh), values_(std::move(values)) {
  if (values_.size() != mesh.num_elements()) throw std::invalid_argument("QField: size does not match element count");
}

double QField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double QField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double QField::integral() const {
  double s = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) s += mesh_->volume(static_cast<int>(k)) * values_[k];
  return s;
}

bool CRVecField::vanishes_on_boundary(double tol) const {
  for (int f : mesh_->boundary_faces())
    if (values_[static_cast<std::size_t>(f)].cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

CRVecField& CRVecField::operator+=(const CRVecField& o) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

CRVecField& CRVecField::operator-=(const CRVecField& o) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

CRVecField& CRVecField::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

QField project_Q(const TetMesh& mesh, const ScalarFunction& f, int degree) {
  QField g(mesh);
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const int ki = static_cast<int>(k);
    g[k] = integrate_element(mesh, ki, f, degree) / mesh.volume(ki);
  }
  return g;
}

QVecField project_Q(const TetMesh& mesh, const VectorFunction& f, int degree) {
  QVecField g(mesh);
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const int ki = static_cast<int>(k);
    g[k] = integrate_element(mesh, ki, f, degree) / mesh.volume(ki);
  }
  return g;
}

CRField project_V(const TetMesh& mesh, const ScalarFunction& f, int degree) {
  CRField v(mesh);
  for (std::size_t s = 0; s < mesh.num_faces(); ++s) {
    const int si = static_cast<int>(s);
    v[s] = integrate_face(mesh, si, f, degree) / mesh.face(si).area;
  }
  return v;
}

CRVecField project_V(const TetMesh& mesh, const VectorFunction& f, int degree) {
  CRVecField v(mesh);
  for (std::size_t s = 0; s < mesh.num_faces(); ++s) {
    const int si = static_cast<int>(s);
    v[s] = integrate_face(mesh, si, f, degree) / mesh.face(si).area;
  }
  return v;
}

// The barycenter of a tet is the mean of its face barycenters, so the element mean of an
// affine function is the mean of its face means.
QField element_mean(const CRField& v) {
  const TetMesh& mesh = v.mesh();
  QField g(mesh);
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    double s = 0.0;
    for (int f : mesh.element_faces(static_cast<int>(k))) s += v.at(f);
    g[k] = 0.25 * s;
  }
  return g;
}

QVecField element_mean(const CRVecField& v) {
  const TetMesh& mesh = v.mesh();
  QVecField g(mesh);
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    Vec3 s = Vec3::Zero();
    for (int f : mesh.element_faces(static_cast<int>(k))) s += v.at(f);
    g[k] = 0.25 * s;
  }
  return g;
}

Vec3 grad_h(const CRField& v, int k) {
  const TetMesh& mesh = v.mesh();
  Vec3 g = Vec3::Zero();
  for (int i = 0; i < 4; ++i) g += v.at(mesh.element_faces(k)[static_cast<std::size_t>(i)]) * basis_gradient(mesh, k, i);
  return g;
}

Mat3 grad_h(const CRVecField& v, int k) {
  const TetMesh& mesh = v.mesh();
  Mat3 g = Mat3::Zero();
  for (int i = 0; i < 4; ++i)
    g += v.at(mesh.element_faces(k)[static_cast<std::size_t>(i)]) * basis_gradient(mesh, k, i).transpose();
  return g;
}

std::vector<Mat3> grad_h(const CRVecField& v) {
  std::vector<Mat3> g(v.mesh().num_elements());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = grad_h(v, static_cast<int>(k));
  return g;
}

double div_h(const CRVecField& v, int k) { return grad_h(v, k).trace(); }

QField div_h(const CRVecField& v) {
  QField d(v.mesh());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = div_h(v, static_cast<int>(k));
  return d;
}

double evaluate(const CRField& v, int k, const Vec3& x) {
  const TetMesh& mesh = v.mesh();
  double mean = 0.0;
  for (int f : mesh.element_faces(k)) mean += v.at(f);
  return 0.25 * mean + grad_h(v, k).dot(x - mesh.barycenter(k));
}

Vec3 evaluate(const CRVecField& v, int k, const Vec3& x) {
  const TetMesh& mesh = v.mesh();
  Vec3 mean = Vec3::Zero();
  for (int f : mesh.element_faces(k)) mean += v.at(f);
  return 0.25 * mean + grad_h(v, k) * (x - mesh.barycenter(k));
}

JumpAverage jump_avg(const QField& g, int face, bool flip) {
  const Face& f = g.mesh().face(face);
  if (f.is_boundary()) throw std::invalid_argument("jump_avg: face " + std::to_string(face) + " is on the boundary");
  const double minus = g.at(f.owner), plus = g.at(f.neighbor);
  const double jump = plus - minus;
  return {flip ? -jump : jump, 0.5 * (plus + minus)};
}

JumpAverage jump_avg(const CRField& v, int face, bool flip) {
  const TetMesh& mesh = v.mesh();
  const Face& f = mesh.face(face);
  if (f.is_boundary()) throw std::invalid_argument("jump_avg: face " + std::to_string(face) + " is on the boundary");
  const double minus = evaluate(v, f.owner, f.barycenter), plus = evaluate(v, f.neighbor, f.barycenter);
  const double jump = plus - minus;
  return {flip ? -jump : jump, 0.5 * (plus + minus)};
}

double q_seminorm(const QField& g, double p) {
  const TetMesh& mesh = g.mesh();
  const double h = mesh.h();
  double s = 0.0;
  for (int f : mesh.interior_faces()) {
    const Face& face = mesh.face(f);
    s += face.area * std::pow(std::abs(g.at(face.neighbor) - g.at(face.owner)), p) / std::pow(h, p - 1.0);
  }
  return std::pow(s, 1.0 / p);
}

double v_seminorm(const CRField& v, double p) {
  const TetMesh& mesh = v.mesh();
  double s = 0.0;
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const int ki = static_cast<int>(k);
    s += mesh.volume(ki) * std::pow(grad_h(v, ki).norm(), p);
  }
  return std::pow(s, 1.0 / p);
}

double v_seminorm(const CRVecField& v, double p) {
  const TetMesh& mesh = v.mesh();
  double s = 0.0;
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const int ki = static_cast<int>(k);
    s += mesh.volume(ki) * std::pow(grad_h(v, ki).norm(), p);
  }
  return std::pow(s, 1.0 / p);
}

double lp_norm(const QField& g, double p) {
  const TetMesh& mesh = g.mesh();
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) s += mesh.volume(static_cast<int>(k)) * std::pow(std::abs(g[k]), p);
  return std::pow(s, 1.0 / p);
}

double lp_norm(const CRField& v, double p, int degree) {
  const TetMesh& mesh = v.mesh();
  double s = 0.0;
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const int ki = static_cast<int>(k);
    s += integrate_element(mesh, ki, [&](const Vec3& x) { return std::pow(std::abs(evaluate(v, ki, x)), p); }, degree);
  }
  return std::pow(s, 1.0 / p);
}

double lp_norm(const CRVecField& v, double p, int degree) {
  const TetMesh& mesh = v.mesh();
  double s = 0.0;
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const int ki = static_cast<int>(k);
    const Mat3 g = grad_h(v, ki);
    Vec3 mean = Vec3::Zero();
    for (int f : mesh.element_faces(ki)) mean += v.at(f);
    mean *= 0.25;
    const Vec3& xk = mesh.barycenter(ki);
    s += integrate_element(mesh, ki, [&](const Vec3& x) { return std::pow((mean + g * (x - xk)).norm(), p); }, degree);
  }
  return std::pow(s, 1.0 / p);
}

BoundaryClassification classify_boundary(const TetMesh& mesh, const CRVecField& u_boundary) {
  BoundaryClassification bc;
  bc.kind.assign(mesh.num_faces(), BoundaryKind::Interior);
  for (int f : mesh.boundary_faces()) {
    const Face& face = mesh.face(f);
    const double un = u_boundary.at(f).dot(face.normal);
    if (un < 0.0) {
      bc.inflow.push_back(f);
      bc.kind[static_cast<std::size_t>(f)] = BoundaryKind::Inflow;
    } else {
      bc.outflow.push_back(f);
      bc.kind[static_cast<std::size_t>(f)] = BoundaryKind::Outflow;
    }
    // Sign of the affine representative at the face corners.
    const double scale = 1e-12 * std::max(1.0, u_boundary.at(f).norm());
    bool pos = false, neg = false;
    for (const Vec3& x : mesh.face_corners(f)) {
      const double s = evaluate(u_boundary, face.owner, x).dot(face.normal);
      pos = pos || s > scale;
      neg = neg || s < -scale;
    }
    if (pos && neg) bc.mixed_sign_faces.push_back(f);
  }
  return bc;
}

}  // namespace crfv
