#pragma once

#include "crfv/spaces.hpp"

#include <algorithm>
#include <vector>

namespace crfv {

inline double positive_part(double c) { return std::max(c, 0.0); }
inline double negative_part(double c) { return std::min(c, 0.0); }

/// Up_{sigma,n}[g,u] = g^- [u.n]^+ + g^+ [u.n]^-.
inline double up_operator(double g_minus, double g_plus, double un) {
  return g_minus * positive_part(un) + g_plus * negative_part(un);
}

/// u_sigma . n_sigma for every face, computed once and shared by all consumers.
struct FaceVelocity {
  std::vector<double> un;

  FaceVelocity() = default;
  explicit FaceVelocity(const CRVecField& u);
  double operator[](std::size_t f) const { return un[f]; }
  /// u_sigma . n_{sigma,K} for local face i of element k.
  double outward(const TetMesh& mesh, int k, int local_face) const {
    return mesh.orientation(k, local_face) * un[static_cast<std::size_t>(mesh.element_faces(k)[static_cast<std::size_t>(local_face)])];
  }
};

/// Upwind value on an interior face: the owner value when u_sigma . n_sigma >= 0.
double upwind_value(const QField& g, const CRVecField& u, int face);
double upwind_value(const QField& g, const FaceVelocity& un, int face);
/// Index of the upwind element of an interior face.
int upwind_element(const TetMesh& mesh, const FaceVelocity& un, int face);

/// Up_sigma[g,u] with respect to the fixed face normal.
double up_flux(const QField& g, const FaceVelocity& un, int face);

/// F_{sigma,K}[g,u] = g^up u_sigma . n_{sigma,K}. Throws std::invalid_argument if K is not
/// incident to the interior face.
double flux(const QField& g, const CRVecField& u, int face, int element);

struct FaceFluxSet {
  std::vector<double> upwind;    // g^up per face, NaN on the boundary
  std::vector<double> up;        // Up_sigma per face, 0 on the boundary
  std::vector<double> owner_flux; // F_{sigma,owner}
};

FaceFluxSet face_fluxes(const QField& g, const CRVecField& u);

/// Left minus right side of the discrete integration-by-parts formula for upwind fluxes,
///   int g u . grad(phi) = -sum_K r_K sum_{sigma int} |sigma| F_{sigma,K} + corrections,
/// with every integral evaluated by quadrature of the given degree. u - u_B must vanish on
/// the boundary; boundary face terms use the face means u_{B,sigma}.
double discrete_ibp_residual(const QField& g, const QField& r, const CRVecField& u, const CRVecField& u_b,
                             const ScalarFunction& phi, const std::function<Vec3(const Vec3&)>& grad_phi,
                             int degree = 6);

}  // namespace crfv
