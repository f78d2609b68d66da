#pragma once

#include "crfv/mesh.hpp"
#include "crfv/quadrature.hpp"

#include <functional>
#include <type_traits>
#include <utility>
#include <vector>

namespace crfv {

using ScalarFunction = std::function<double(const Vec3&)>;
using VectorFunction = std::function<Vec3(const Vec3&)>;

/// Piecewise-constant scalar field, one value per element.
class QField {
 public:
  QField() = default;
  explicit QField(const TetMesh& mesh, double value = 0.0)
      : mesh_(&mesh), values_(mesh.num_elements(), value) {}
  QField(const TetMesh& mesh, std::vector<double> values);

  const TetMesh& mesh() const { return *mesh_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double at(int k) const { return values_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  double min() const;
  double max() const;
  /// Integral over the domain.
  double integral() const;

 private:
  const TetMesh* mesh_ = nullptr;
  std::vector<double> values_;
};

/// Piecewise-constant vector field, one 3-vector per element.
class QVecField {
 public:
  QVecField() = default;
  explicit QVecField(const TetMesh& mesh, const Vec3& value = Vec3::Zero())
      : mesh_(&mesh), values_(mesh.num_elements(), value) {}

  const TetMesh& mesh() const { return *mesh_; }
  std::size_t size() const noexcept { return values_.size(); }
  const Vec3& operator[](std::size_t k) const { return values_[k]; }
  Vec3& operator[](std::size_t k) { return values_[k]; }
  const Vec3& at(int k) const { return values_[static_cast<std::size_t>(k)]; }
  const std::vector<Vec3>& values() const noexcept { return values_; }

 private:
  const TetMesh* mesh_ = nullptr;
  std::vector<Vec3> values_;
};

/// Crouzeix-Raviart scalar field: one face mean per face.
class CRField {
 public:
  CRField() = default;
  explicit CRField(const TetMesh& mesh, double value = 0.0)
      : mesh_(&mesh), values_(mesh.num_faces(), value) {}

  const TetMesh& mesh() const { return *mesh_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t f) const { return values_[f]; }
  double& operator[](std::size_t f) { return values_[f]; }
  double at(int f) const { return values_[static_cast<std::size_t>(f)]; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  const TetMesh* mesh_ = nullptr;
  std::vector<double> values_;
};

/// Crouzeix-Raviart vector field: one face-mean vector per face, components interleaved.
class CRVecField {
 public:
  CRVecField() = default;
  explicit CRVecField(const TetMesh& mesh, const Vec3& value = Vec3::Zero())
      : mesh_(&mesh), values_(mesh.num_faces(), value) {}

  const TetMesh& mesh() const { return *mesh_; }
  std::size_t size() const noexcept { return values_.size(); }
  const Vec3& operator[](std::size_t f) const { return values_[f]; }
  Vec3& operator[](std::size_t f) { return values_[f]; }
  const Vec3& at(int f) const { return values_[static_cast<std::size_t>(f)]; }
  const std::vector<Vec3>& values() const noexcept { return values_; }
  const double* data() const { return values_.front().data(); }

  /// Membership in V0: every boundary face mean vanishes.
  bool vanishes_on_boundary(double tol = 0.0) const;

  CRVecField& operator+=(const CRVecField& o);
  CRVecField& operator-=(const CRVecField& o);
  CRVecField& operator*=(double s);
  friend CRVecField operator+(CRVecField a, const CRVecField& b) { return a += b; }
  friend CRVecField operator-(CRVecField a, const CRVecField& b) { return a -= b; }
  friend CRVecField operator*(double s, CRVecField a) { return a *= s; }

 private:
  const TetMesh* mesh_ = nullptr;
  std::vector<Vec3> values_;
};

// ---------------------------------------------------------------------------
// Projections

/// Cell averages of f computed with the given quadrature degree.
QField project_Q(const TetMesh& mesh, const ScalarFunction& f, int degree = 2);
QVecField project_Q(const TetMesh& mesh, const VectorFunction& f, int degree = 2);
/// Face means of f.
CRField project_V(const TetMesh& mesh, const ScalarFunction& f, int degree = 2);
CRVecField project_V(const TetMesh& mesh, const VectorFunction& f, int degree = 2);

/// Element means of a CR field (the Q-projection of its affine representative).
QField element_mean(const CRField& v);
QVecField element_mean(const CRVecField& v);

// ---------------------------------------------------------------------------
// Broken differential operators

/// Gradient of the affine representative on element k.
Vec3 grad_h(const CRField& v, int k);
/// Jacobian G(i,j) = d v_i / d x_j of the affine representative on element k.
Mat3 grad_h(const CRVecField& v, int k);
std::vector<Mat3> grad_h(const CRVecField& v);
double div_h(const CRVecField& v, int k);
QField div_h(const CRVecField& v);

/// Value of the affine representative of v on element k at point x.
double evaluate(const CRField& v, int k, const Vec3& x);
Vec3 evaluate(const CRVecField& v, int k, const Vec3& x);

/// Gradient of the CR basis function of local face i on element k: |sigma| n_{sigma,K} / |K|.
inline Vec3 basis_gradient(const TetMesh& mesh, int k, int local_face) {
  const Face& f = mesh.face(mesh.element_faces(k)[static_cast<std::size_t>(local_face)]);
  return (f.area / mesh.volume(k)) * mesh.outward_normal(k, local_face);
}

// ---------------------------------------------------------------------------
// Jumps and averages

struct JumpAverage {
  double jump;
  double average;
};

/// Jump g^+ - g^- and average relative to the face normal. `flip` uses -n_sigma.
/// Throws std::invalid_argument on boundary faces.
JumpAverage jump_avg(const QField& g, int face, bool flip = false);
/// Jump and average of the element traces of a CR field's affine representatives at
/// the face barycenter.
JumpAverage jump_avg(const CRField& v, int face, bool flip = false);

// ---------------------------------------------------------------------------
// Norms

/// Broken Q^{1,p} seminorm: (sum_int |sigma| |[[g]]|^p / h^{p-1})^{1/p}.
double q_seminorm(const QField& g, double p);
/// Broken V^{1,p} seminorm: (int |grad_h v|^p)^{1/p}, Frobenius norm for vectors.
double v_seminorm(const CRField& v, double p);
double v_seminorm(const CRVecField& v, double p);
double lp_norm(const QField& g, double p);
/// L^p norm of the piecewise-affine representative, evaluated by quadrature.
double lp_norm(const CRField& v, double p, int degree = 4);
double lp_norm(const CRVecField& v, double p, int degree = 4);

namespace detail {
template <class R>
R zero_of() {
  if constexpr (std::is_arithmetic_v<R>) return R(0);
  else return R::Zero();
}
}  // namespace detail

/// Integral of an arbitrary function over element k.
template <class F>
auto integrate_element(const TetMesh& mesh, int k, F&& f, int degree = 2) {
  const TetRule& rule = tet_rule(degree);
  using R = std::decay_t<decltype(f(Vec3{}))>;
  R sum = detail::zero_of<R>();
  for (std::size_t q = 0; q < rule.weights.size(); ++q) sum += rule.weights[q] * f(mesh.point(k, rule.points[q]));
  return R(mesh.volume(k) * sum);
}

/// Integral of an arbitrary function over face fid.
template <class F>
auto integrate_face(const TetMesh& mesh, int fid, F&& f, int degree = 2) {
  const TriRule& rule = tri_rule(degree);
  const auto c = mesh.face_corners(fid);
  using R = std::decay_t<decltype(f(Vec3{}))>;
  R sum = detail::zero_of<R>();
  for (std::size_t q = 0; q < rule.weights.size(); ++q) {
    const auto& l = rule.points[q];
    sum += rule.weights[q] * f(Vec3(l[0] * c[0] + l[1] * c[1] + l[2] * c[2]));
  }
  return R(mesh.face(fid).area * sum);
}

}  // namespace crfv
