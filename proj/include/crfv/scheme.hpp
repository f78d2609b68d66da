#pragma once

#include "crfv/flux.hpp"
#include "crfv/kernels.hpp"
#include "crfv/physics.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace crfv {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class LinearSolverKind { Auto, Direct, Iterative };

struct LinearSolverOptions {
  LinearSolverKind kind = LinearSolverKind::Auto;
  double tol = 1e-12;
  int max_iterations = 5000;
  /// Auto uses the sparse direct solver below this many unknowns.
  std::size_t direct_threshold = 1500;
};

struct SchemeParams {
  double dt = 0.1;
  double mu = 1.0;
  double lambda = 0.0;
  PressureLaw law = PressureLaw::isentropic(1.0, 2.0);
  RegularizationParams reg;
  double fp_tol = 1e-9;
  int fp_max = 100;
  double theta = 1.0;
  int anderson = 5;  // mixing depth of the Picard loop, 0 disables
  LinearSolverOptions lin;
  Exec exec = Exec::Parallel;

  /// Throws DomainError when mu <= 0, lambda + 2 mu / 3 <= 0, dt <= 0 or theta outside (0, 1].
  void validate() const;
};

/// Discrete boundary data: rho_B = Pi^Q[r_B], u_B = Pi^V[u_B] and the induced inflow/outflow split.
struct BoundaryData {
  QField rho_b;
  CRVecField u_b;
  BoundaryClassification cls;
  std::vector<Mat3> grad_u_b;  // per element
  std::vector<Vec3> mean_u_b;  // per element

  static BoundaryData make(const TetMesh& mesh, const ScalarFunction& r_b, const VectorFunction& u_b, int degree = 2);
  static BoundaryData make(QField rho_b, CRVecField u_b);
};

/// (rho^k, u^k) at time level k. v = u - u_B vanishes on boundary faces.
struct State {
  int k = 0;
  double t = 0.0;
  QField rho;
  CRVecField u;

  CRVecField v(const BoundaryData& bd) const { return u - bd.u_b; }
};

struct StepInfo {
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
  double min_rho = 0.0;  // over every Picard iterate
  double theta = 1.0;    // damping in use at exit
  bool monotone = true;  // fixed-point residual never increased
};

struct ContinuitySystem {
  SparseMatrix A;
  Vector b;
};

struct MomentumSystem {
  SparseMatrix A;
  Vector b;
};

/// Per-element momentum forcing integrals int_K f, or empty for the unforced scheme.
using ForcingLoad = std::vector<Vec3>;
ForcingLoad forcing_load(const TetMesh& mesh, const VectorFunction& f, int degree = 2);

/// One implicit step of the scheme solved by Picard iteration, with linear solvers and
/// the momentum sparsity pattern cached across steps.
class Scheme {
 public:
  Scheme(const TetMesh& mesh, BoundaryData bd, SchemeParams params);
  ~Scheme();
  Scheme(const Scheme&) = delete;
  Scheme& operator=(const Scheme&) = delete;

  const TetMesh& mesh() const { return *mesh_; }
  const BoundaryData& boundary() const { return bd_; }
  const SchemeParams& params() const { return params_; }

  /// rho^0 = Pi^Q[r0], u^0 = Pi^V[u0] with boundary face means replaced by u_B.
  State initial_state(const ScalarFunction& r0, const VectorFunction& u0, int degree = 2) const;

  ContinuitySystem assemble_continuity(const QField& rho_prev, const FaceVelocity& un) const;
  /// Solves the continuity system. Throws SolverError on breakdown and InvariantViolation if
  /// the solution is not strictly positive.
  QField solve_continuity(const ContinuitySystem& sys) const;

  /// Linear momentum system in the interior-face unknowns of v, with upwind directions and
  /// face velocities frozen from u_frozen.
  MomentumSystem assemble_momentum(const QField& rho, const QField& rho_prev, const CRVecField& v_prev,
                                   const CRVecField& u_frozen, const ForcingLoad* f = nullptr) const;
  /// Solves the momentum system; x0 is the initial guess for iterative solvers.
  Vector solve_momentum(const MomentumSystem& sys, const Vector& x0) const;

  Vector pack(const CRVecField& v) const;
  CRVecField unpack(const Vector& x) const;

  /// Advances prev by one step. Throws NonConvergence when the Picard loop exceeds fp_max.
  State step(const State& prev, const ForcingLoad* f = nullptr, StepInfo* info = nullptr);

  std::size_t momentum_unknowns() const { return 3 * mesh_->interior_faces().size(); }

  struct Pattern;
  struct Solvers;

 private:
  const TetMesh* mesh_;
  BoundaryData bd_;
  SchemeParams params_;
  std::unique_ptr<Pattern> pattern_;
  std::unique_ptr<Solvers> solvers_;
};

struct Trajectory {
  std::vector<State> states;
  std::vector<StepInfo> steps;
  bool failed = false;
  std::string failure;
};

/// Forcing as a function of time; evaluated at t_k for step k.
using TimeForcing = std::function<Vec3(double, const Vec3&)>;
using StepHook = std::function<void(const State&, const StepInfo&)>;

/// Runs N steps. On a step failure the trajectory keeps every accepted state and records the
/// error message. The hook sees the initial state (with an empty StepInfo) and every accepted step.
Trajectory run(Scheme& scheme, const State& init, int steps, const StepHook& hook = {},
               const TimeForcing& forcing = {});

}  // namespace crfv
