#pragma once

#include "crfv/flux.hpp"
#include "crfv/physics.hpp"

#include <vector>

namespace crfv {

/// Execution policy for the element and face kernels. Serial is the reference
/// implementation; Parallel uses OpenMP and must agree with it to rounding.
enum class Exec { Serial, Parallel };

namespace kernels {

/// Reductions are split into this many fixed chunks whose partial sums are added in order,
/// so parallel results do not depend on the thread count.
inline constexpr int kReductionChunks = 64;

void element_gradients(const CRVecField& v, std::vector<Mat3>& out, Exec exec);
void element_means(const CRVecField& v, std::vector<Vec3>& out, Exec exec);
void face_normal_velocity(const CRVecField& u, std::vector<double>& un, Exec exec);

/// Row residuals of the discrete continuity equation, element by element (gather form):
/// |K|(rho_K - rho'_K)/dt + fluxes + boundary terms + diffusion.
void continuity_residual(const QField& rho, const QField& rho_prev, const FaceVelocity& un, const QField& rho_b,
                         const BoundaryClassification& cls, double dt, double diffusion, std::vector<double>& out,
                         Exec exec);

struct EnergySums {
  double kinetic = 0.0;   // int 1/2 rho |w|^2
  double internal = 0.0;  // int H_h(rho)
};

EnergySums energy(const QField& rho, const std::vector<Vec3>& w, const PressureLaw& law,
                  const RegularizationParams& reg, Exec exec);

/// Deterministic chunked sum of f(i) for i in [0, n). Both policies add the same chunk
/// partials in the same order, so they agree bit for bit.
template <class F>
double chunked_sum(std::size_t n, F&& f, Exec exec) {
  double partial[kReductionChunks] = {};
  const auto chunk = [&](int c) {
    const std::size_t lo = n * static_cast<std::size_t>(c) / kReductionChunks;
    const std::size_t hi = n * static_cast<std::size_t>(c + 1) / kReductionChunks;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f(i);
    partial[c] = s;
  };
  if (exec == Exec::Serial) {
    for (int c = 0; c < kReductionChunks; ++c) chunk(c);
  } else {
#pragma omp parallel for schedule(static)
    for (int c = 0; c < kReductionChunks; ++c) chunk(c);
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

}  // namespace kernels
}  // namespace crfv
