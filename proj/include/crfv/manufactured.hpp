#pragma once

#include "crfv/diagnostics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace crfv {

using SpaceTimeScalar = std::function<double(double, const Vec3&)>;
using SpaceTimeVector = std::function<Vec3(double, const Vec3&)>;

struct ManufacturedCase {
  std::string name;
  Box box;
  double T = 1.0;
  double mu = 1.0;
  double lambda = 0.0;
  PressureLaw law = PressureLaw::isentropic(1.0, 2.0);

  SpaceTimeScalar r;
  SpaceTimeVector V;       // vanishes on the boundary
  ScalarFunction r_b;
  VectorFunction u_b;
  SpaceTimeVector forcing; // empty when f = 0
  /// d_t r + div(r U); zero for every built-in case.
  SpaceTimeScalar mass_source;
  /// Steady and unforced: the scheme must reproduce the projection up to solver tolerance.
  bool exact = false;

  Vec3 U(double t, const Vec3& x) const { return V(t, x) + u_b(x); }
  ReferenceSolution reference() const { return {r, V, u_b}; }
};

struct CaseCOptions {
  double rho_bar = 1.0;
  double delta = 0.25;  // density modulation r = rho_bar (1 + delta sin(pi y) sin(pi z))
  double u_bar = 0.5;   // inflow speed along e_x
  double q0 = 200.0;    // vortex amplitude
  double T = 0.5;
};

/// (a) constant state at rest, (b) uniform transport through the unit cube entering at x = 0,
/// (c) divergence-free forced vortex over a density profile r(y, z).
ManufacturedCase case_constant(double mu, double lambda, const PressureLaw& law, double rho_bar = 1.0);
ManufacturedCase case_transport(double mu, double lambda, const PressureLaw& law, double rho_bar = 1.0,
                                const Vec3& u_bar = Vec3(0.5, 0.0, 0.0));
ManufacturedCase case_vortex(double mu, double lambda, const PressureLaw& law, const CaseCOptions& opt = {});
std::vector<ManufacturedCase> builtin_cases(double mu = 1.0, double lambda = 0.0,
                                            const PressureLaw& law = PressureLaw::isentropic(1.0, 2.0));
/// Looks up "constant", "transport" or "vortex"; throws std::invalid_argument otherwise.
ManufacturedCase builtin_case(const std::string& name, double mu, double lambda, const PressureLaw& law);

struct LevelResult {
  int n = 0;
  double h = 0.0;
  double dt = 0.0;
  int steps = 0;
  std::size_t elements = 0;
  bool failed = false;
  std::string failure;
  double rel_energy = 0.0;  // E_h at t = T
  double grad_error = 0.0;  // dt sum_k ||grad_h (u^k - Pi^V U(t_k))||^2
  double velocity_error = 0.0;
  double max_rho_error = 0.0;   // max_k max_K |rho - Pi^Q r(t_k)|
  double max_v_error = 0.0;     // max_k max_sigma |u - Pi^V U(t_k)|
  /// dt sum_k |<R^C, phi>| and dt sum_k |<R^M, phi>| per catalog entry.
  std::vector<double> consistency_c;
  std::vector<double> consistency_m;
  double seconds = 0.0;
};

struct ConvergenceReport {
  std::string case_name;
  std::vector<LevelResult> levels;
  std::vector<std::string> c_names, m_names;
  bool failed = false;
  bool exact = false;  // errors at the solver floor on every level
  std::optional<double> eoc_rel_energy, eoc_grad_error;
  std::vector<std::optional<double>> eoc_c, eoc_m;
  bool monotone = false;
  bool pass = false;
};

struct StudyOptions {
  SchemeParams params;     // dt is overwritten per level
  double dt_factor = 1.0;  // dt = dt_factor * h rounded so that T is hit exactly
  bool consistency = true;
  double exact_tol = 1e-7;
  int degree = 4;
};

/// Runs the case on structured box meshes with n cells per side for every n in levels.
ConvergenceReport convergence_study(const ManufacturedCase& c, const std::vector<int>& levels,
                                    const StudyOptions& opt);

/// One level of a study; exposed for the CLI and tests.
LevelResult run_level(const ManufacturedCase& c, int n, const StudyOptions& opt, Trajectory* keep = nullptr);

}  // namespace crfv
