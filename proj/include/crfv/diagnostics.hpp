#pragma once

#include "crfv/scheme.hpp"

#include <functional>
#include <string>
#include <vector>

namespace crfv {

// ---------------------------------------------------------------------------
// Mass

struct MassStep {
  double mass = 0.0;
  double outflow = 0.0;        // dt sum_out |sigma| rho u_B.n (>= 0)
  double inflow = 0.0;         // dt sum_in |sigma| rho_B |u_B.n| (>= 0)
  double step_residual = 0.0;  // M^k - M^{k-1} + outflow - inflow
};

MassStep mass_step(const QField& rho, const QField& rho_prev, const BoundaryData& bd, double dt);

struct MassLedgerRow {
  int k = 0;
  double t = 0.0;
  MassStep step;
  double cumulative_outflow = 0.0;
  double cumulative_inflow = 0.0;
  double residual = 0.0;  // |M^m + sum outflow - M^0 - sum inflow|
};

std::vector<MassLedgerRow> mass_balance_residual(const Trajectory& traj, const BoundaryData& bd, double dt);

// ---------------------------------------------------------------------------
// Energy

/// Every term of the discrete energy balance for one step, each already multiplied by dt
/// where the balance carries a dt. The dissipation entries are nonnegative in exact
/// arithmetic.
struct EnergyLedger {
  double kinetic = 0.0;
  double internal = 0.0;
  double energy = 0.0;
  double energy_prev = 0.0;

  double viscous = 0.0;             // dt int S(grad v) : grad v
  double time_dissipation = 0.0;    // sum |K| (1/2 rho' |vhat - vhat'|^2 + E_Hh(rho'|rho))
  double upwind_dissipation = 0.0;  // dt/2 sum |sigma| |Up| |[[vhat]]|^2
  double upwind_entropy = 0.0;      // dt sum |sigma| |u.n| E_Hh(rho_up | rho_down)
  double diffusion_entropy = 0.0;   // dt kappa h^omega sum |sigma| [[rho]] [[H_h'(rho)]]
  double outflow_internal = 0.0;    // dt sum_out |sigma| u_B.n H_h(rho)
  double outflow_kinetic = 0.0;     // dt sum_out |sigma| u_B.n rho |vhat|^2 / 2
  double inflow_entropy = 0.0;      // dt sum_in |sigma| |u_B.n| E_Hh(rho_B | rho)

  double inflow_internal = 0.0;     // dt sum_in |sigma| |u_B.n| H_h(rho_B)
  double inflow_kinetic = 0.0;      // dt sum_in |sigma| |u_B.n| rho_B |vhat|^2 / 2
  double boundary_viscous = 0.0;    // -dt int S(grad u_B) : grad v
  double boundary_pressure = 0.0;   // -dt int p_h(rho) div u_B
  double boundary_convective = 0.0; // -dt int rho uhat . grad u_B . vhat
  double forcing_work = 0.0;        // dt int f . vhat

  /// Energy inequality: rhs - (dE + viscous + outflow_internal), nonnegative up to solver error.
  double slack = 0.0;
  /// Full identity: left side including every dissipation term minus right side.
  double identity_residual = 0.0;

  double rhs() const {
    return inflow_internal + inflow_kinetic + boundary_viscous + boundary_pressure + boundary_convective +
           forcing_work;
  }
  /// Smallest of the terms that are nonnegative in exact arithmetic.
  double min_dissipation() const;
};

EnergyLedger energy_step(const State& prev, const State& next, const BoundaryData& bd, const SchemeParams& params,
                         const ForcingLoad* f = nullptr);

/// Normalization for energy tolerances: int (1/2 rho|vhat|^2 + |H_h(rho)| + p_h(rho)) at a state.
double energy_scale(const State& s, const BoundaryData& bd, const SchemeParams& params);

// ---------------------------------------------------------------------------
// Renormalization

struct RenormalizedTerms {
  std::vector<double> residual;     // per element, left minus right side
  std::vector<double> time_entropy; // |K| E_B(rho'|rho) / dt
  std::vector<double> face_entropy; // sum over faces where K is downwind of |sigma||u.n| E_B(rho_up|rho_K)
  std::vector<double> inflow_entropy;
  double scale = 0.0;               // max |term| used for relative tolerances
};

RenormalizedTerms renormalized_continuity_residual(const QField& rho, const QField& rho_prev, const CRVecField& u,
                                                   const BoundaryData& bd, const SchemeParams& params,
                                                   const std::function<double(double)>& B,
                                                   const std::function<double(double)>& dB);

// ---------------------------------------------------------------------------
// Consistency

struct ScalarTest {
  std::string name;
  ScalarFunction phi;
  VectorFunction grad;
};

struct VectorTest {
  std::string name;
  VectorFunction phi;
  std::function<Mat3(const Vec3&)> jacobian;  // J(i,j) = d phi_i / d x_j
};

/// Smooth test functions on the unit cube; the vector ones vanish on the boundary of the box.
std::vector<ScalarTest> continuity_test_catalog();
std::vector<VectorTest> momentum_test_catalog(const Box& box = {});

/// <R^C, phi> for one step: the weak continuity form evaluated at the discrete solution.
double consistency_residual_continuity(const State& prev, const State& next, const BoundaryData& bd,
                                       const SchemeParams& params, const ScalarTest& phi, int degree = 4);
/// <R^M, phi> for one step, minus int f . phi when a forcing is given.
double consistency_residual_momentum(const State& prev, const State& next, const BoundaryData& bd,
                                     const SchemeParams& params, const VectorTest& phi,
                                     const VectorFunction* f = nullptr, int degree = 4);

// ---------------------------------------------------------------------------
// Errors against a reference solution

struct ReferenceSolution {
  std::function<double(double, const Vec3&)> r;
  std::function<Vec3(double, const Vec3&)> V;  // velocity minus the boundary extension
  VectorFunction u_b;
};

struct ErrorRow {
  int k = 0;
  double t = 0.0;
  double rel_energy = 0.0;    // E(rho, vhat | r, V)
  double rel_energy_h = 0.0;  // plus kappa_tilde h^eta int (rho - r)^2
  double velocity_l2 = 0.0;   // ||u_h - Pi^V U||_{L^2}^2
  double velocity_h1 = 0.0;   // ||grad_h (u_h - Pi^V U)||_{L^2}^2
  double cumulative_l2 = 0.0; // dt sum of velocity_l2 up to k
  double cumulative_h1 = 0.0;
};

ErrorRow error_vs_reference(const State& s, const BoundaryData& bd, const SchemeParams& params,
                            const ReferenceSolution& ref, int degree = 4);
std::vector<ErrorRow> error_vs_reference(const Trajectory& traj, const BoundaryData& bd, const SchemeParams& params,
                                         const ReferenceSolution& ref, int degree = 4);

// ---------------------------------------------------------------------------
// Time reconstruction

/// Piecewise-linear interpolant in time of a trajectory. Times outside [0, T] are clamped.
class TimeReconstruction {
 public:
  explicit TimeReconstruction(const Trajectory& traj);
  CRVecField velocity(double t) const;
  QField density(double t) const;
  /// D_t u on the interval containing t.
  CRVecField velocity_rate(double t) const;

 private:
  const Trajectory* traj_;
  std::pair<std::size_t, double> locate(double t) const;
};

// ---------------------------------------------------------------------------
// Estimates and convergence orders

struct EstimateMonitor {
  double rho_linf_lgamma = 0.0;  // max_k ||rho^k||_{L^gamma}
  double momentum_linf_l2 = 0.0; // max_k ||sqrt(rho) uhat||_{L^2}
  double grad_v_l2l2 = 0.0;      // (dt sum_k ||grad_h v^k||^2)^{1/2}
};

EstimateMonitor estimate_monitor(const Trajectory& traj, const BoundaryData& bd, const SchemeParams& params);

/// Least-squares slope of log(value) against log(h). Throws std::invalid_argument on fewer
/// than two levels or nonpositive input.
double eoc(const std::vector<double>& values, const std::vector<double>& hs);

// ---------------------------------------------------------------------------
// Per-step report

struct DiagnosticsReport {
  int k = 0;
  double t = 0.0;
  MassStep mass;
  double mass_residual = 0.0;  // cumulative
  EnergyLedger energy;
  int fp_iterations = 0;
  double fp_residual = 0.0;
  double min_rho = 0.0;
};

}  // namespace crfv
