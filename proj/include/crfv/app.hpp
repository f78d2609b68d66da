#pragma once

#include "crfv/config.hpp"
#include "crfv/output.hpp"

#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace crfv {

struct Certificate {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Outcome {
  std::vector<Certificate> certificates;
  bool solver_failed = false;
  std::string failure;

  /// 0 all certificates passed, 1 some failed, 2 the solver failed.
  int exit_code() const;
  bool all_passed() const;
};

struct LedgerOptions {
  bool energy = true;
  bool errors = true;
  bool consistency = true;
  int degree = 4;
};

/// Ledgers of a trajectory; rows for every accepted time level.
LedgerSet compute_ledgers(const Trajectory& traj, const BoundaryData& bd, const SchemeParams& params,
                          const ManufacturedCase& c, const LedgerOptions& opt);

/// Runs the configured case, writes ledgers (and VTK at the configured cadence) to the output
/// directory and evaluates the enabled certificates.
Outcome run_solve(const RunConfig& cfg, std::ostream& log);

/// Identity suite on the configured mesh: upwind and CR identities on random fields drawn
/// from cfg.seed, then renormalized continuity, mass and energy identities on one step.
Outcome run_check(const RunConfig& cfg, std::ostream& log);

/// Refinement study over the given levels; writes eoc.csv and levels.csv.
Outcome run_convergence(const RunConfig& cfg, const std::vector<int>& levels, std::ostream& log);

/// Tolerance helpers shared by the CLI certificates and the acceptance suite.
namespace tolerance {
inline constexpr double energy_slack = 1e-8;     // times the initial energy scale
inline constexpr double mass_cumulative = 1e-9;  // times the initial mass
inline constexpr double identity = 1e-12;
inline constexpr double quadrature_identity = 1e-10;
}  // namespace tolerance

}  // namespace crfv
