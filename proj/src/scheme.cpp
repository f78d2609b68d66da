#include "crfv/scheme.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

namespace crfv {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

void SchemeParams::validate() const {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (!(mu > 0.0)) throw DomainError("mu must be positive");
  if (!(lambda + 2.0 * mu / 3.0 > 0.0)) throw DomainError("lambda + 2 mu / 3 must be positive");
  if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("damping theta must lie in (0, 1]");
  if (anderson < 0) throw DomainError("anderson depth must be nonnegative");
  if (!(fp_tol > 0.0) || fp_max < 1) throw DomainError("fixed-point tolerance and budget must be positive");
  if (!(lin.tol > 0.0)) throw DomainError("linear tolerance must be positive");
  if (reg.kappa_tilde != 0 && reg.kappa_tilde != 1) throw DomainError("kappa_tilde must be 0 or 1");
  if (reg.kappa != 0 && reg.kappa != 1) throw DomainError("kappa must be 0 or 1");
  if (!(reg.eta > 0.0) || !(reg.omega > 0.0)) throw DomainError("eta and omega must be positive");
}

namespace {

void finish_boundary(BoundaryData& bd) {
  const TetMesh& mesh = bd.u_b.mesh();
  bd.cls = classify_boundary(mesh, bd.u_b);
  bd.grad_u_b = grad_h(bd.u_b);
  bd.mean_u_b = element_mean(bd.u_b).values();
  if (!(bd.rho_b.min() > 0.0)) throw DomainError("boundary density must be positive");
}

}  // namespace

BoundaryData BoundaryData::make(const TetMesh& mesh, const ScalarFunction& r_b, const VectorFunction& u_b,
                                int degree) {
  return make(project_Q(mesh, r_b, degree), project_V(mesh, u_b, degree));
}

BoundaryData BoundaryData::make(QField rho_b, CRVecField u_b) {
  BoundaryData bd;
  bd.rho_b = std::move(rho_b);
  bd.u_b = std::move(u_b);
  finish_boundary(bd);
  return bd;
}

ForcingLoad forcing_load(const TetMesh& mesh, const VectorFunction& f, int degree) {
  ForcingLoad load(mesh.num_elements());
  for (std::size_t k = 0; k < load.size(); ++k) load[k] = integrate_element(mesh, static_cast<int>(k), f, degree);
  return load;
}

// Block sparsity of the momentum matrix: interior face tau couples to the interior faces of
// every element within one face-neighbour step of the elements containing tau.
struct Scheme::Pattern {
  std::vector<int> row_start;  // per interior face, into cols
  std::vector<int> cols;       // interior indices, sorted per row
  SparseMatrix zero;           // scalar matrix with the full pattern and zero values

  explicit Pattern(const TetMesh& mesh) {
    const auto interior = mesh.interior_faces();
    const std::size_t n = interior.size();
    row_start.assign(n + 1, 0);
    std::vector<int> row;
    for (std::size_t t = 0; t < n; ++t) {
      const Face& f = mesh.face(interior[t]);
      row.clear();
      for (int k : {f.owner, f.neighbor}) {
        for (int i = 0; i < 4; ++i) {
          for (int e : {k, mesh.across(k, i)}) {
            if (e < 0) continue;
            for (int g : mesh.element_faces(e))
              if (mesh.interior_index(g) >= 0) row.push_back(mesh.interior_index(g));
          }
        }
      }
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
      cols.insert(cols.end(), row.begin(), row.end());
      row_start[t + 1] = static_cast<int>(cols.size());
    }
    const auto rows = static_cast<Eigen::Index>(3 * n);
    std::vector<int> outer(3 * n + 1, 0);
    std::vector<int> inner;
    inner.reserve(9 * cols.size());
    for (std::size_t t = 0; t < n; ++t)
      for (int c = 0; c < 3; ++c) {
        for (int p = row_start[t]; p < row_start[t + 1]; ++p)
          for (int d = 0; d < 3; ++d) inner.push_back(3 * cols[static_cast<std::size_t>(p)] + d);
        outer[3 * t + static_cast<std::size_t>(c) + 1] = static_cast<int>(inner.size());
      }
    std::vector<double> values(inner.size(), 0.0);
    zero = Eigen::Map<const SparseMatrix>(rows, rows, static_cast<Eigen::Index>(inner.size()), outer.data(),
                                          inner.data(), values.data());
  }

  // Position of block (t, s) in the scalar value array, component (0, 0).
  std::size_t block(int t, int s) const {
    const auto b = cols.begin() + row_start[static_cast<std::size_t>(t)];
    const auto e = cols.begin() + row_start[static_cast<std::size_t>(t) + 1];
    const auto it = std::lower_bound(b, e, s);
    if (it == e || *it != s) throw InvariantViolation("momentum pattern is missing a coupling");
    return 9 * static_cast<std::size_t>(row_start[static_cast<std::size_t>(t)]) + 3 * static_cast<std::size_t>(it - b);
  }
  std::size_t row_length(int t) const {
    return static_cast<std::size_t>(row_start[static_cast<std::size_t>(t) + 1] - row_start[static_cast<std::size_t>(t)]);
  }
};

namespace {

class BlockWriter {
 public:
  BlockWriter(double* values, const Scheme::Pattern& pattern) : v_(values), p_(pattern) {}

  void add(int t, int s, const Mat3& m) {
    const std::size_t base = p_.block(t, s), stride = 3 * p_.row_length(t);
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t d = 0; d < 3; ++d) v_[base + c * stride + d] += m(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(d));
  }
  void add_diag(int t, int s, double a) {
    const std::size_t base = p_.block(t, s), stride = 3 * p_.row_length(t);
    for (std::size_t c = 0; c < 3; ++c) v_[base + c * stride + c] += a;
  }

 private:
  double* v_;
  const Scheme::Pattern& p_;
};

}  // namespace

namespace {

// ILUT factors kept across Picard iterates and time steps; refreshed when Krylov counts grow.
struct CachedSolver {
  Eigen::SparseLU<ColMatrix> lu;
  bool analyzed = false;
  Eigen::IncompleteLUT<double> ilu;
  bool ilu_ready = false;
  Eigen::Index ilu_baseline = 0;
};

}  // namespace

struct Scheme::Solvers {
  CachedSolver continuity;
  CachedSolver momentum;
};

Scheme::Scheme(const TetMesh& mesh, BoundaryData bd, SchemeParams params)
    : mesh_(&mesh), bd_(std::move(bd)), params_(std::move(params)) {
  params_.validate();
  pattern_ = std::make_unique<Pattern>(mesh);
  solvers_ = std::make_unique<Solvers>();
}

Scheme::~Scheme() = default;

State Scheme::initial_state(const ScalarFunction& r0, const VectorFunction& u0, int degree) const {
  State s;
  s.rho = project_Q(*mesh_, r0, degree);
  if (!(s.rho.min() > 0.0)) throw DomainError("initial density must be positive");
  s.u = project_V(*mesh_, u0, degree);
  for (int f : mesh_->boundary_faces()) s.u[static_cast<std::size_t>(f)] = bd_.u_b.at(f);
  return s;
}

ContinuitySystem Scheme::assemble_continuity(const QField& rho_prev, const FaceVelocity& un) const {
  const TetMesh& mesh = *mesh_;
  const double dt = params_.dt, diff = params_.reg.diffusion_coefficient();
  const auto ne = static_cast<Eigen::Index>(mesh.num_elements());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * mesh.num_elements());
  ContinuitySystem sys;
  sys.b.resize(ne);
  for (int k = 0; k < ne; ++k) {
    double diag = mesh.volume(k) / dt;
    double rhs = mesh.volume(k) * rho_prev.at(k) / dt;
    for (int i = 0; i < 4; ++i) {
      const int f = mesh.element_faces(k)[static_cast<std::size_t>(i)];
      const Face& face = mesh.face(f);
      const double a = un.outward(mesh, k, i);
      if (face.is_boundary()) {
        if (bd_.cls.is_inflow(f)) rhs -= face.area * bd_.rho_b.at(k) * a;
        else diag += face.area * a;
        continue;
      }
      const int l = mesh.across(k, i);
      const bool k_upwind = (k == face.owner) == (un[static_cast<std::size_t>(f)] >= 0.0);
      double off = -diff * face.area;
      diag += diff * face.area;
      if (k_upwind) diag += face.area * a;
      else off += face.area * a;
      trip.emplace_back(k, l, off);
    }
    trip.emplace_back(k, k, diag);
    sys.b[k] = rhs;
  }
  sys.A.resize(ne, ne);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

namespace {

bool use_direct(const LinearSolverOptions& o, Eigen::Index n) {
  if (o.kind == LinearSolverKind::Direct) return true;
  if (o.kind == LinearSolverKind::Iterative) return false;
  return static_cast<std::size_t>(n) < o.direct_threshold;
}

// Preconditioner view of a factorization computed elsewhere; compute() is a no-op.
class SharedIlu {
 public:
  SharedIlu() = default;
  template <class M>
  explicit SharedIlu(const M&) {}
  template <class M>
  SharedIlu& analyzePattern(const M&) { return *this; }
  template <class M>
  SharedIlu& factorize(const M&) { return *this; }
  template <class M>
  SharedIlu& compute(const M&) { return *this; }
  template <class R>
  Vector solve(const R& b) const { return ilu->solve(b); }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

  const Eigen::IncompleteLUT<double>* ilu = nullptr;
};

void build_ilu(const SparseMatrix& A, CachedSolver& c, const char* what) {
  c.ilu.setDroptol(1e-4);
  c.ilu.setFillfactor(4);
  c.ilu.compute(A);
  if (c.ilu.info() != Eigen::Success) {
    c.ilu_ready = false;
    throw SolverError(std::string(what) + ": incomplete LU setup failed", 0.0);
  }
  c.ilu_ready = true;
  c.ilu_baseline = 0;
}

double relative_residual(const SparseMatrix& A, const Vector& x, const Vector& b) {
  return (A * x - b).norm() / std::max(b.norm(), 1e-300);
}

Vector solve_linear(const SparseMatrix& A, const Vector& b, const Vector& x0, const LinearSolverOptions& o,
                    CachedSolver& c, const char* what) {
  Vector x;
  if (use_direct(o, A.rows())) {
    const ColMatrix Ac = A;
    if (!c.analyzed) {
      c.lu.analyzePattern(Ac);
      c.analyzed = true;
    }
    c.lu.factorize(Ac);
    if (c.lu.info() != Eigen::Success) {
      c.analyzed = false;
      throw SolverError(std::string(what) + ": sparse LU factorization failed: " + c.lu.lastErrorMessage(), 0.0);
    }
    x = c.lu.solve(b);
  } else {
    const Vector guess = x0.size() == b.size() ? x0 : Vector::Zero(b.size());
    const auto krylov = [&](Eigen::Index& iters) {
      Eigen::BiCGSTAB<SparseMatrix, SharedIlu> it;
      it.preconditioner().ilu = &c.ilu;
      it.setTolerance(o.tol);
      it.setMaxIterations(o.max_iterations);
      it.compute(A);
      Vector y = it.solveWithGuess(b, guess);
      iters = it.iterations();
      const bool ok = it.info() == Eigen::Success && relative_residual(A, y, b) <= 100.0 * o.tol;
      return std::pair<bool, Vector>(ok, std::move(y));
    };
    bool fresh = !c.ilu_ready;
    if (fresh) build_ilu(A, c, what);
    Eigen::Index iters = 0;
    auto [ok, y] = krylov(iters);
    if (!ok && !fresh) {
      build_ilu(A, c, what);
      fresh = true;
      std::tie(ok, y) = krylov(iters);
    }
    if (fresh) c.ilu_baseline = iters;
    // A stale preconditioner is rebuilt on the next call once it costs noticeably more iterations.
    else if (iters > 2 * c.ilu_baseline + 10) c.ilu_ready = false;
    x = std::move(y);
  }
  const double res = relative_residual(A, x, b);
  // Krylov tolerance is relative to the preconditioned residual; accept a small margin.
  if (!std::isfinite(res) || res > 100.0 * o.tol) {
    c.ilu_ready = false;
    std::ostringstream os;
    os << what << ": linear residual " << res << " exceeds tolerance " << o.tol;
    throw SolverError(os.str(), res);
  }
  return x;
}

}  // namespace

QField Scheme::solve_continuity(const ContinuitySystem& sys) const {
  const Vector x = solve_linear(sys.A, sys.b, Vector(), params_.lin, solvers_->continuity, "continuity");
  QField rho(*mesh_, std::vector<double>(x.data(), x.data() + x.size()));
  const double m = rho.min();
  if (!(m > 0.0)) {
    std::ostringstream os;
    os << "density lost positivity: min rho = " << m;
    throw InvariantViolation(os.str());
  }
  return rho;
}

Vector Scheme::pack(const CRVecField& v) const {
  const auto interior = mesh_->interior_faces();
  Vector x(static_cast<Eigen::Index>(3 * interior.size()));
  for (std::size_t t = 0; t < interior.size(); ++t) x.segment<3>(static_cast<Eigen::Index>(3 * t)) = v.at(interior[t]);
  return x;
}

CRVecField Scheme::unpack(const Vector& x) const {
  const auto interior = mesh_->interior_faces();
  CRVecField v(*mesh_);
  for (std::size_t t = 0; t < interior.size(); ++t)
    v[static_cast<std::size_t>(interior[t])] = x.segment<3>(static_cast<Eigen::Index>(3 * t));
  return v;
}

MomentumSystem Scheme::assemble_momentum(const QField& rho, const QField& rho_prev, const CRVecField& v_prev,
                                         const CRVecField& u_frozen, const ForcingLoad* f) const {
  const TetMesh& mesh = *mesh_;
  const Pattern& pat = *pattern_;
  const double dt = params_.dt, mu = params_.mu, ml = params_.mu + params_.lambda;
  const double diff = params_.reg.diffusion_coefficient();
  const FaceVelocity un(u_frozen);

  MomentumSystem sys;
  sys.A = pat.zero;
  sys.b = Vector::Zero(sys.A.rows());
  BlockWriter A(sys.A.valuePtr(), pat);
  auto load = [&](int t) { return sys.b.segment<3>(3 * t); };

  std::vector<Vec3> vhat_prev;
  kernels::element_means(v_prev, vhat_prev, Exec::Serial);

  for (std::size_t kk = 0; kk < mesh.num_elements(); ++kk) {
    const int k = static_cast<int>(kk);
    const auto& faces = mesh.element_faces(k);
    std::array<int, 4> idx{};
    std::array<Vec3, 4> g{};
    for (int i = 0; i < 4; ++i) {
      idx[static_cast<std::size_t>(i)] = mesh.interior_index(faces[static_cast<std::size_t>(i)]);
      g[static_cast<std::size_t>(i)] = basis_gradient(mesh, k, i);
    }
    const double vol = mesh.volume(k), rk = rho.at(k);

    // Time derivative and boundary convection act on vhat_K . phihat_K.
    double c = vol * rk / dt;
    for (int i = 0; i < 4; ++i) {
      const int fi = faces[static_cast<std::size_t>(i)];
      if (!mesh.face(fi).is_boundary()) continue;
      const double b = bd_.u_b.at(fi).dot(mesh.outward_normal(k, i)) * mesh.face(fi).area;
      c += (bd_.cls.is_inflow(fi) ? bd_.rho_b.at(k) : rk) * b;
    }
    const Mat3 gb = bd_.grad_u_b[kk];
    const Mat3 background = (vol * rk / 16.0) * gb;
    const Vec3 time_load = 0.25 * vol * rho_prev.at(k) / dt * vhat_prev[kk];
    const Vec3 background_load = -0.25 * vol * rk * (gb * bd_.mean_u_b[kk]);
    const double pressure = p_h(params_.law, params_.reg, rk) * vol;

    for (int i = 0; i < 4; ++i) {
      const int t = idx[static_cast<std::size_t>(i)];
      if (t < 0) continue;
      const Vec3& gi = g[static_cast<std::size_t>(i)];
      load(t) += time_load + background_load + pressure * gi;
      if (f != nullptr) load(t) += 0.25 * (*f)[kk];
      for (int j = 0; j < 4; ++j) {
        const Vec3& gj = g[static_cast<std::size_t>(j)];
        Mat3 visc = (vol * mu * gi.dot(gj)) * Mat3::Identity() + (vol * ml) * gi * gj.transpose();
        // u = v + u_B, and u_B lives on every face.
        load(t) -= visc * bd_.u_b.at(faces[static_cast<std::size_t>(j)]);
        const int s = idx[static_cast<std::size_t>(j)];
        if (s < 0) continue;
        visc += background;
        visc.diagonal().array() += c / 16.0;
        A.add(t, s, visc);
      }
    }

    // Upwind convection of rho vhat through interior faces of K.
    for (int j = 0; j < 4; ++j) {
      const int fj = faces[static_cast<std::size_t>(j)];
      const Face& face = mesh.face(fj);
      if (face.is_boundary()) continue;
      const double a = un.outward(mesh, k, j);
      const int up = un[static_cast<std::size_t>(fj)] >= 0.0 ? face.owner : face.neighbor;
      const double w = face.area * a * rho.at(up) / 16.0;
      if (w == 0.0) continue;
      for (int i = 0; i < 4; ++i) {
        const int t = idx[static_cast<std::size_t>(i)];
        if (t < 0) continue;
        for (int m : mesh.element_faces(up)) {
          const int s = mesh.interior_index(m);
          if (s >= 0) A.add_diag(t, s, w);
        }
      }
    }
  }

  // Density diffusion: diff |sigma| [[rho]] {vhat} . [[phihat]] with [[.]] = neighbor - owner.
  if (diff > 0.0) {
    for (int fs : mesh.interior_faces()) {
      const Face& face = mesh.face(fs);
      const double d = diff * face.area * (rho.at(face.neighbor) - rho.at(face.owner));
      if (d == 0.0) continue;
      for (int side : {face.owner, face.neighbor}) {
        const double sign = side == face.neighbor ? 1.0 : -1.0;
        for (int ft : mesh.element_faces(side)) {
          const int t = mesh.interior_index(ft);
          if (t < 0) continue;
          for (int e : {face.owner, face.neighbor})
            for (int m : mesh.element_faces(e)) {
              const int s = mesh.interior_index(m);
              if (s >= 0) A.add_diag(t, s, sign * d / 32.0);
            }
        }
      }
    }
  }
  return sys;
}

Vector Scheme::solve_momentum(const MomentumSystem& sys, const Vector& x0) const {
  return solve_linear(sys.A, sys.b, x0, params_.lin, solvers_->momentum, "momentum");
}

State Scheme::step(const State& prev, const ForcingLoad* f, StepInfo* info) {
  StepInfo local;
  StepInfo& st = info != nullptr ? *info : local;
  st = StepInfo{};
  st.theta = params_.theta;

  const CRVecField v_prev = prev.v(bd_);
  CRVecField v = v_prev;
  QField rho = prev.rho;
  Vector x = pack(v);
  double last = std::numeric_limits<double>::infinity();
  st.min_rho = std::numeric_limits<double>::infinity();
  bool converged = false;

  // Anderson mixing of the velocity iterate. Each density iterate is still a continuity
  // solve, so positivity is unaffected; depth 0 is plain damped Picard.
  const int depth = params_.anderson;
  std::vector<Vector> dx, df;
  Vector x_old, f_old;

  for (int it = 1; it <= params_.fp_max; ++it) {
    const CRVecField u = v + bd_.u_b;
    const FaceVelocity un(u);
    QField rho_new = solve_continuity(assemble_continuity(prev.rho, un));
    st.min_rho = std::min(st.min_rho, rho_new.min());
    const MomentumSystem sys = assemble_momentum(rho_new, prev.rho, v_prev, u, f);
    const Vector x_solved = solve_momentum(sys, x);
    const Vector fx = x_solved - x;

    QField drho = rho_new;
    for (std::size_t k = 0; k < drho.size(); ++k) drho[k] -= rho[k];
    const CRVecField v_solved = unpack(x_solved);
    const double res = v_seminorm(v_solved - v, 2.0) + lp_norm(drho, 2.0);
    const double scale = v_seminorm(v_solved, 2.0) + lp_norm(rho_new, 2.0);
    st.residual_history.push_back(res / scale);
    st.iterations = it;
    st.residual = res / scale;
    rho = std::move(rho_new);
    if (res <= params_.fp_tol * scale) {
      v = v_solved;
      converged = true;
      break;
    }
    if (res > last && it > 1) {
      st.monotone = false;
      st.theta = std::max(st.theta * 0.5, 1.0 / 1024.0);
      dx.clear();
      df.clear();
    } else if (depth > 0 && it > 1) {
      dx.push_back(x - x_old);
      df.push_back(fx - f_old);
      if (static_cast<int>(dx.size()) > depth) {
        dx.erase(dx.begin());
        df.erase(df.begin());
      }
    }
    last = res;
    x_old = x;
    f_old = fx;

    Vector x_new = x + st.theta * fx;
    if (!df.empty()) {
      Eigen::MatrixXd F(fx.size(), static_cast<Eigen::Index>(df.size())), X(F.rows(), F.cols());
      for (std::size_t j = 0; j < df.size(); ++j) {
        F.col(static_cast<Eigen::Index>(j)) = df[j];
        X.col(static_cast<Eigen::Index>(j)) = dx[j];
      }
      const Eigen::VectorXd g = F.colPivHouseholderQr().solve(fx);
      if (g.allFinite()) x_new -= X * g + st.theta * (F * g);
    }
    x = x_new;
    v = unpack(x);
  }
  if (!converged) {
    std::ostringstream os;
    os << "fixed-point iteration did not converge in " << params_.fp_max << " iterations (residual " << st.residual
       << ")";
    throw NonConvergence(os.str(), st.residual);
  }

  State next;
  next.k = prev.k + 1;
  next.t = prev.t + params_.dt;
  next.u = v + bd_.u_b;
  // Final density consistent with the converged velocity.
  next.rho = solve_continuity(assemble_continuity(prev.rho, FaceVelocity(next.u)));
  st.min_rho = std::min(st.min_rho, next.rho.min());
  return next;
}

Trajectory run(Scheme& scheme, const State& init, int steps, const StepHook& hook, const TimeForcing& forcing) {
  Trajectory traj;
  traj.states.push_back(init);
  if (hook) hook(init, StepInfo{});
  for (int n = 0; n < steps; ++n) {
    const State& prev = traj.states.back();
    StepInfo info;
    try {
      ForcingLoad load;
      if (forcing) {
        const double t = prev.t + scheme.params().dt;
        load = forcing_load(scheme.mesh(), [&](const Vec3& x) { return forcing(t, x); });
      }
      State next = scheme.step(prev, forcing ? &load : nullptr, &info);
      traj.states.push_back(std::move(next));
      traj.steps.push_back(info);
      if (hook) hook(traj.states.back(), info);
    } catch (const std::exception& e) {
      traj.failed = true;
      traj.failure = e.what();
      break;
    }
  }
  return traj;
}

}  // namespace crfv
