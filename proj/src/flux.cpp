#include "crfv/flux.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace crfv {

FaceVelocity::FaceVelocity(const CRVecField& u) : un(u.size()) {
  const TetMesh& mesh = u.mesh();
  for (std::size_t f = 0; f < un.size(); ++f) un[f] = u[f].dot(mesh.face(static_cast<int>(f)).normal);
}

namespace {

void require_interior(const Face& f, int face) {
  if (f.is_boundary()) throw std::invalid_argument("face " + std::to_string(face) + " is not interior");
}

}  // namespace

int upwind_element(const TetMesh& mesh, const FaceVelocity& un, int face) {
  const Face& f = mesh.face(face);
  require_interior(f, face);
  return un[static_cast<std::size_t>(face)] >= 0.0 ? f.owner : f.neighbor;
}

double upwind_value(const QField& g, const FaceVelocity& un, int face) {
  return g.at(upwind_element(g.mesh(), un, face));
}

double upwind_value(const QField& g, const CRVecField& u, int face) {
  const Face& f = g.mesh().face(face);
  require_interior(f, face);
  return u.at(face).dot(f.normal) >= 0.0 ? g.at(f.owner) : g.at(f.neighbor);
}

double up_flux(const QField& g, const FaceVelocity& un, int face) {
  const Face& f = g.mesh().face(face);
  require_interior(f, face);
  return up_operator(g.at(f.owner), g.at(f.neighbor), un[static_cast<std::size_t>(face)]);
}

double flux(const QField& g, const CRVecField& u, int face, int element) {
  const Face& f = g.mesh().face(face);
  require_interior(f, face);
  double sign;
  if (element == f.owner) sign = 1.0;
  else if (element == f.neighbor) sign = -1.0;
  else throw std::invalid_argument("element " + std::to_string(element) + " is not incident to face " + std::to_string(face));
  const double un = u.at(face).dot(f.normal);
  const double gup = un >= 0.0 ? g.at(f.owner) : g.at(f.neighbor);
  return gup * sign * un;
}

FaceFluxSet face_fluxes(const QField& g, const CRVecField& u) {
  const TetMesh& mesh = g.mesh();
  const FaceVelocity un(u);
  FaceFluxSet s;
  s.upwind.assign(mesh.num_faces(), std::numeric_limits<double>::quiet_NaN());
  s.up.assign(mesh.num_faces(), 0.0);
  s.owner_flux.assign(mesh.num_faces(), 0.0);
  for (int f : mesh.interior_faces()) {
    const auto i = static_cast<std::size_t>(f);
    s.upwind[i] = upwind_value(g, un, f);
    s.up[i] = up_flux(g, un, f);
    s.owner_flux[i] = s.upwind[i] * un[i];
  }
  return s;
}

double discrete_ibp_residual(const QField& g, const QField& r, const CRVecField& u, const CRVecField& u_b,
                             const ScalarFunction& phi, const std::function<Vec3(const Vec3&)>& grad_phi,
                             int degree) {
  const TetMesh& mesh = g.mesh();
  const FaceVelocity un(u);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t kk = 0; kk < mesh.num_elements(); ++kk) {
    const int k = static_cast<int>(kk);
    const double gk = g.at(k), rk = r.at(k);
    const Mat3 grad = grad_h(u, k);
    lhs += gk * integrate_element(mesh, k, [&](const Vec3& x) { return evaluate(u, k, x).dot(grad_phi(x)); }, degree);
    rhs += gk * grad.trace() * integrate_element(mesh, k, [&](const Vec3& x) { return rk - phi(x); }, degree);
    for (int i = 0; i < 4; ++i) {
      const int f = mesh.element_faces(k)[static_cast<std::size_t>(i)];
      const Face& face = mesh.face(f);
      const Vec3 n = mesh.outward_normal(k, i);
      // Deviation of the trace from its face mean.
      rhs += gk * integrate_face(mesh, f, [&](const Vec3& x) { return (evaluate(u, k, x) - u.at(f)).dot(n) * (phi(x) - rk); },
                                 degree);
      if (face.is_boundary()) {
        rhs += gk * u_b.at(f).dot(n) * integrate_face(mesh, f, [&](const Vec3& x) { return phi(x) - rk; }, degree);
        continue;
      }
      const double unk = un.outward(mesh, k, i);
      const int l = mesh.across(k, i);
      const double gup = unk >= 0.0 ? gk : g.at(l);
      rhs -= face.area * gup * unk * rk;
      rhs += (g.at(l) - gk) * negative_part(unk) * integrate_face(mesh, f, [&](const Vec3& x) { return rk - phi(x); }, degree);
    }
  }
  return lhs - rhs;
}

}  // namespace crfv
