#include "crfv/app.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

namespace crfv {

namespace fs = std::filesystem;

int Outcome::exit_code() const {
  if (solver_failed) return 2;
  return all_passed() ? 0 : 1;
}

bool Outcome::all_passed() const {
  return std::all_of(certificates.begin(), certificates.end(), [](const Certificate& c) { return c.passed; });
}

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

void add(Outcome& o, std::ostream& log, std::string name, bool ok, std::string detail) {
  log << (ok ? "PASS " : "FAIL ") << name << "  " << detail << "\n";
  o.certificates.push_back({std::move(name), ok, std::move(detail)});
}

bool boundary_at_rest(const BoundaryData& bd) {
  for (std::size_t f = 0; f < bd.u_b.size(); ++f)
    if (!bd.u_b[f].isZero()) return false;
  return true;
}

}  // namespace

LedgerSet compute_ledgers(const Trajectory& traj, const BoundaryData& bd, const SchemeParams& params,
                          const ManufacturedCase& c, const LedgerOptions& opt) {
  LedgerSet l;
  l.mass = mass_balance_residual(traj, bd, params.dt);
  for (const State& s : traj.states) l.times.push_back(s.t);
  l.iterations.push_back(0);
  l.min_rho.push_back(traj.states.front().rho.min());
  for (const auto& st : traj.steps) {
    l.iterations.push_back(st.iterations);
    l.min_rho.push_back(st.min_rho);
  }

  if (opt.energy) {
    EnergyLedger e0;
    const auto sums = kernels::energy(traj.states.front().rho, element_mean(traj.states.front().v(bd)).values(),
                                      params.law, params.reg, params.exec);
    e0.kinetic = sums.kinetic;
    e0.internal = sums.internal;
    e0.energy = e0.energy_prev = sums.kinetic + sums.internal;
    l.energy.push_back(e0);
    for (std::size_t k = 1; k < traj.states.size(); ++k) {
      const State& next = traj.states[k];
      ForcingLoad load;
      if (c.forcing) load = forcing_load(next.rho.mesh(), [&](const Vec3& x) { return c.forcing(next.t, x); });
      l.energy.push_back(energy_step(traj.states[k - 1], next, bd, params, c.forcing ? &load : nullptr));
    }
  }

  if (opt.errors) l.errors = error_vs_reference(traj, bd, params, c.reference(), opt.degree);

  if (opt.consistency) {
    const auto cc = continuity_test_catalog();
    const auto mc = momentum_test_catalog(c.box);
    for (const auto& t : cc) l.c_names.push_back(t.name);
    for (const auto& t : mc) l.m_names.push_back(t.name);
    l.consistency_c.emplace_back(cc.size(), 0.0);
    l.consistency_m.emplace_back(mc.size(), 0.0);
    for (std::size_t k = 1; k < traj.states.size(); ++k) {
      const State& prev = traj.states[k - 1];
      const State& next = traj.states[k];
      VectorFunction f;
      if (c.forcing) f = [&](const Vec3& x) { return c.forcing(next.t, x); };
      std::vector<double> rc, rm;
      for (const auto& t : cc) rc.push_back(consistency_residual_continuity(prev, next, bd, params, t, opt.degree));
      for (const auto& t : mc)
        rm.push_back(consistency_residual_momentum(prev, next, bd, params, t, c.forcing ? &f : nullptr, opt.degree));
      l.consistency_c.push_back(std::move(rc));
      l.consistency_m.push_back(std::move(rm));
    }
  }
  return l;
}

Outcome run_solve(const RunConfig& cfg, std::ostream& log) {
  Outcome out;
  for (const auto& w : cfg.warnings) log << "warning: " << w << "\n";
  const TetMesh mesh = cfg.make_mesh();
  const ManufacturedCase c = cfg.make_case();
  const SchemeParams p = cfg.scheme_params(mesh.h());
  const int steps = cfg.steps(mesh.h());
  const BoundaryData bd = BoundaryData::make(mesh, c.r_b, c.u_b, cfg.quad_degree);
  if (!bd.cls.mixed_sign_faces.empty())
    log << "warning: " << bd.cls.mixed_sign_faces.size()
        << " boundary faces where u_B.n changes sign; classified by the face mean\n";
  log << "mesh: " << mesh.num_elements() << " elements, h = " << mesh.h() << "; case " << c.name << "; " << steps
      << " steps of dt = " << p.dt << "\n";

  fs::create_directories(cfg.output_dir);
  Scheme scheme(mesh, bd, p);
  const State init = scheme.initial_state([&](const Vec3& x) { return c.r(0.0, x); },
                                          [&](const Vec3& x) { return c.U(0.0, x); }, cfg.quad_degree);
  StepHook hook;
  if (cfg.vtk_every > 0) {
    hook = [&](const State& s, const StepInfo&) {
      if (s.k % cfg.vtk_every == 0 || s.k == steps) {
        char name[64];
        std::snprintf(name, sizeof name, "state_%05d.vtk", s.k);
        write_vtk((fs::path(cfg.output_dir) / name).string(), s, p.law, p.reg);
      }
    };
  }
  const Trajectory traj = run(scheme, init, steps, hook, c.forcing);
  if (traj.failed) {
    out.solver_failed = true;
    out.failure = traj.failure;
    log << "solver failure after " << traj.steps.size() << " steps: " << traj.failure << "\n";
  }

  LedgerOptions lo;
  lo.energy = cfg.check_energy;
  lo.errors = cfg.check_errors;
  lo.consistency = cfg.check_consistency;
  lo.degree = cfg.quad_degree;
  const LedgerSet l = compute_ledgers(traj, bd, p, c, lo);
  const fs::path dir(cfg.output_dir);
  write_mass_csv((dir / "mass.csv").string(), l);
  if (lo.energy) write_energy_csv((dir / "energy.csv").string(), l);
  if (lo.errors) write_errors_csv((dir / "errors.csv").string(), l);
  if (lo.consistency) write_consistency_csv((dir / "consistency.csv").string(), l);

  double min_rho = std::numeric_limits<double>::infinity();
  for (double m : l.min_rho) min_rho = std::min(min_rho, m);
  add(out, log, "positivity", min_rho > 0.0, "min rho over all iterates " + sci(min_rho));

  if (cfg.check_mass) {
    double worst = 0.0;
    for (std::size_t k = 1; k < l.mass.size(); ++k)
      worst = std::max(worst, std::abs(l.mass[k].step.step_residual) / l.mass[k].step.mass);
    const double cum = l.mass.back().residual / l.mass.front().step.mass;
    add(out, log, "mass_step", worst <= 10.0 * p.lin.tol, "max relative step residual " + sci(worst));
    add(out, log, "mass_cumulative", cum <= tolerance::mass_cumulative, "relative cumulative residual " + sci(cum));
  }
  if (cfg.check_energy) {
    const double scale = energy_scale(traj.states.front(), bd, p);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < l.energy.size(); ++k) worst = std::min(worst, l.energy[k].slack);
    add(out, log, "energy_inequality", worst >= -tolerance::energy_slack * scale,
        "min slack " + sci(worst) + " (scale " + sci(scale) + ")");
    if (boundary_at_rest(bd) && !c.forcing) {
      double rise = 0.0;
      for (std::size_t k = 1; k < l.energy.size(); ++k)
        rise = std::max(rise, l.energy[k].energy - l.energy[k - 1].energy);
      add(out, log, "energy_nonincreasing", rise <= tolerance::energy_slack * scale, "max increase " + sci(rise));
    }
  }
  if (cfg.check_errors && c.exact) {
    double worst = 0.0;
    for (const State& s : traj.states) {
      const QField r = project_Q(mesh, [&](const Vec3& x) { return c.r(s.t, x); }, cfg.quad_degree);
      const CRVecField U = project_V(mesh, [&](const Vec3& x) { return c.U(s.t, x); }, cfg.quad_degree);
      for (std::size_t k = 0; k < r.size(); ++k) worst = std::max(worst, std::abs(s.rho[k] - r[k]));
      for (std::size_t f = 0; f < U.size(); ++f) worst = std::max(worst, (s.u[f] - U[f]).cwiseAbs().maxCoeff());
    }
    add(out, log, "exact_reproduction", worst <= 10.0 * p.fp_tol, "max nodal error " + sci(worst));
  }
  if (cfg.check_errors && !l.errors.empty()) {
    const auto& e = l.errors.back();
    log << "final relative energy " << sci(e.rel_energy_h) << ", dt sum ||grad(u - U)||^2 " << sci(e.cumulative_h1)
        << "\n";
  }
  return out;
}

namespace {

// Random fields for the identity suite.
struct Sampler {
  std::mt19937_64 rng;
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  QField positive(const TetMesh& m) {
    QField g(m);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = uniform(0.5, 2.0);
    return g;
  }
  Vec3 vec() { return {uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)}; }
  Mat3 mat() {
    Mat3 a;
    for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = uniform(-1, 1);
    return a;
  }
};

}  // namespace

Outcome run_check(const RunConfig& cfg, std::ostream& log) {
  Outcome out;
  for (const auto& w : cfg.warnings) log << "warning: " << w << "\n";
  const TetMesh mesh = cfg.make_mesh();
  Sampler S{std::mt19937_64(cfg.seed)};
  log << "identity suite on " << mesh.num_elements() << " elements, seed " << cfg.seed << "\n";

  // Random boundary velocity and interior perturbation.
  const Vec3 a0 = S.vec();
  const Mat3 A = S.mat();
  const CRVecField ub = project_V(mesh, [&](const Vec3& x) { return Vec3(a0 + A * x); }, 2);
  CRVecField u = ub;
  for (int f : mesh.interior_faces()) u[static_cast<std::size_t>(f)] += S.vec();
  const QField g = S.positive(mesh), r = S.positive(mesh);
  const FaceVelocity un(u);

  // Antisymmetry of Up and conservation of F.
  double anti = 0.0, scale_a = 0.0;
  for (int f : mesh.interior_faces()) {
    const Face& face = mesh.face(f);
    const double gm = g.at(face.owner), gp = g.at(face.neighbor), v = un[static_cast<std::size_t>(f)];
    anti = std::max(anti, std::abs(up_operator(gm, gp, v) + up_operator(gp, gm, -v)));
    anti = std::max(anti, std::abs(flux(g, u, f, face.owner) + flux(g, u, f, face.neighbor)));
    scale_a = std::max(scale_a, std::abs(gm * v) + std::abs(gp * v));
  }
  add(out, log, "upwind_antisymmetry", anti <= tolerance::identity * std::max(1.0, scale_a), "max residual " + sci(anti));

  // Element-wise flux sum against the face-wise upwind form.
  double lhs = 0.0, rhs = 0.0, s2 = 0.0;
  for (std::size_t kk = 0; kk < mesh.num_elements(); ++kk) {
    const int k = static_cast<int>(kk);
    for (int i = 0; i < 4; ++i) {
      const int f = mesh.element_faces(k)[static_cast<std::size_t>(i)];
      if (mesh.face(f).is_boundary()) continue;
      const double t = r[kk] * mesh.face(f).area * flux(g, u, f, k);
      lhs += t;
      s2 += std::abs(t);
    }
  }
  for (int f : mesh.interior_faces()) {
    const Face& face = mesh.face(f);
    rhs -= face.area * up_flux(g, un, f) * jump_avg(r, f).jump;
  }
  const double summ = std::abs(lhs - rhs);
  add(out, log, "upwind_summation", summ <= tolerance::identity * std::max(1.0, s2), "residual " + sci(summ));

  // Discrete integration by parts with a smooth test function; the residual is quadrature-limited.
  const Vec3 kv = S.vec();
  const ScalarFunction phi = [&](const Vec3& x) { return std::sin(kv.dot(x)) + x[0] * x[1]; };
  const VectorFunction dphi = [&](const Vec3& x) { return Vec3(std::cos(kv.dot(x)) * kv + Vec3(x[1], x[0], 0.0)); };
  const double ibp = std::abs(discrete_ibp_residual(g, r, u, ub, phi, dphi, 8));
  add(out, log, "upwind_integration_by_parts", ibp <= tolerance::quadrature_identity * std::max(1.0, s2),
      "residual " + sci(ibp));

  // int div_h Pi^V u w = int div u w for quadratic u and piecewise constant w.
  const Vec3 b = S.vec(), cq = S.vec();
  const Mat3 B = S.mat();
  const VectorFunction uq = [&](const Vec3& x) { return Vec3(b + B * x + cq.cwiseProduct(x.cwiseProduct(x))); };
  const ScalarFunction divq = [&](const Vec3& x) { return B.trace() + 2.0 * cq.dot(x); };
  const CRVecField ut = project_V(mesh, uq, 2);
  const QField w = S.positive(mesh);
  double vl = 0.0, vr = 0.0, vs = 0.0;
  for (std::size_t kk = 0; kk < mesh.num_elements(); ++kk) {
    const int k = static_cast<int>(kk);
    vl += w[kk] * mesh.volume(k) * div_h(ut, k);
    const double t = w[kk] * integrate_element(mesh, k, divq, 2);
    vr += t;
    vs += std::abs(t);
  }
  add(out, log, "cr_divergence", std::abs(vl - vr) <= tolerance::identity * std::max(1.0, vs),
      "residual " + sci(std::abs(vl - vr)));

  // int grad_h v (x) grad_h Pi^V phi = int grad_h v (x) grad phi for quadratic phi.
  CRField v(mesh);
  for (std::size_t f = 0; f < v.size(); ++f) v[f] = S.uniform(-1, 1);
  const Vec3 pb = S.vec(), pc = S.vec();
  const ScalarFunction pq = [&](const Vec3& x) { return pb.dot(x) + pc.dot(x.cwiseProduct(x)); };
  const VectorFunction gpq = [&](const Vec3& x) { return Vec3(pb + 2.0 * pc.cwiseProduct(x)); };
  const CRField pt = project_V(mesh, pq, 2);
  Mat3 pl = Mat3::Zero(), pr = Mat3::Zero();
  double ps = 0.0;
  for (std::size_t kk = 0; kk < mesh.num_elements(); ++kk) {
    const int k = static_cast<int>(kk);
    const Vec3 gv = grad_h(v, k);
    pl += mesh.volume(k) * gv * grad_h(pt, k).transpose();
    const Mat3 t = gv * integrate_element(mesh, k, gpq, 2).transpose();
    pr += t;
    ps += t.cwiseAbs().sum();
  }
  const double proj = (pl - pr).cwiseAbs().maxCoeff();
  add(out, log, "cr_gradient", proj <= tolerance::identity * std::max(1.0, ps), "residual " + sci(proj));

  // One scheme step for the discrete balances.
  const ManufacturedCase c = cfg.make_case();
  const SchemeParams p = cfg.scheme_params(mesh.h());
  const BoundaryData bd = BoundaryData::make(mesh, c.r_b, c.u_b, cfg.quad_degree);
  Scheme scheme(mesh, bd, p);
  const State s0 = scheme.initial_state([&](const Vec3& x) { return c.r(0.0, x); },
                                        [&](const Vec3& x) { return c.U(0.0, x); }, cfg.quad_degree);
  State s1;
  ForcingLoad load;
  if (c.forcing) load = forcing_load(mesh, [&](const Vec3& x) { return c.forcing(p.dt, x); });
  try {
    s1 = scheme.step(s0, c.forcing ? &load : nullptr);
  } catch (const std::exception& e) {
    out.solver_failed = true;
    out.failure = e.what();
    log << "solver failure: " << e.what() << "\n";
    return out;
  }

  // Renormalized continuity with B = rho^2 against B'(rho_K) times the continuity row residual.
  const auto terms = renormalized_continuity_residual(
      s1.rho, s0.rho, s1.u, bd, p, [](double x) { return x * x; }, [](double x) { return 2.0 * x; });
  const auto sys = scheme.assemble_continuity(s0.rho, FaceVelocity(s1.u));
  const Eigen::Map<const Vector> rv(s1.rho.values().data(), static_cast<Eigen::Index>(s1.rho.size()));
  const Vector row = sys.A * rv - sys.b;
  double rn = 0.0, ent = 0.0;
  for (std::size_t k = 0; k < terms.residual.size(); ++k) {
    rn = std::max(rn, std::abs(terms.residual[k] - 2.0 * s1.rho[k] * row[static_cast<Eigen::Index>(k)]));
    ent = std::min({ent, terms.time_entropy[k], terms.face_entropy[k], terms.inflow_entropy[k]});
  }
  add(out, log, "renormalized_continuity", rn <= tolerance::quadrature_identity * std::max(1.0, terms.scale),
      "residual " + sci(rn) + ", min entropy term " + sci(ent));

  const MassStep m = mass_step(s1.rho, s0.rho, bd, p.dt);
  add(out, log, "mass_step", std::abs(m.step_residual) <= 10.0 * p.lin.tol * m.mass,
      "residual " + sci(m.step_residual));

  const EnergyLedger e = energy_step(s0, s1, bd, p, c.forcing ? &load : nullptr);
  const double escale = energy_scale(s0, bd, p);
  add(out, log, "energy_identity", std::abs(e.identity_residual) <= 1e3 * p.fp_tol * escale,
      "residual " + sci(e.identity_residual) + ", min dissipation " + sci(e.min_dissipation()));
  add(out, log, "energy_inequality", e.slack >= -tolerance::energy_slack * escale, "slack " + sci(e.slack));
  return out;
}

Outcome run_convergence(const RunConfig& cfg, const std::vector<int>& levels, std::ostream& log) {
  Outcome out;
  for (const auto& w : cfg.warnings) log << "warning: " << w << "\n";
  if (!cfg.mesh_file.empty()) log << "note: refinement levels use structured boxes; mesh.file is ignored\n";
  const ManufacturedCase c = cfg.make_case();
  StudyOptions o;
  o.params = cfg.scheme_params(1.0);
  o.dt_factor = cfg.dt_factor;
  o.consistency = cfg.check_consistency;
  o.degree = cfg.quad_degree;
  o.exact_tol = 10.0 * cfg.fp_tol;
  if (cfg.dt) log << "note: time.dt is ignored by the study; dt = dt_factor * h on every level\n";

  ConvergenceReport rep;
  try {
    rep = convergence_study(c, levels, o);
  } catch (const std::exception& e) {
    out.solver_failed = true;
    out.failure = e.what();
    log << "study failed: " << e.what() << "\n";
    return out;
  }
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  write_eoc_csv((dir / "eoc.csv").string(), rep);
  std::vector<std::vector<std::string>> rows;
  for (const auto& l : rep.levels)
    rows.push_back({std::to_string(l.n), fmt(l.h), fmt(l.dt), std::to_string(l.steps), std::to_string(l.elements),
                    l.failed ? "1" : "0", fmt(l.rel_energy), fmt(l.grad_error), fmt(l.velocity_error),
                    fmt(l.max_rho_error), fmt(l.max_v_error)});
  write_csv((dir / "levels.csv").string(),
            {"n", "h", "dt", "steps", "elements", "failed", "rel_energy", "grad_error", "velocity_error",
             "max_rho_error", "max_v_error"},
            rows);
  log << eoc_table(rep);

  if (rep.failed) {
    out.solver_failed = true;
    out.failure = rep.levels.back().failure;
    log << "solver failure on level n = " << rep.levels.back().n << ": " << out.failure << "\n";
    return out;
  }
  if (c.exact) {
    double worst = 0.0;
    for (const auto& l : rep.levels) worst = std::max({worst, l.max_rho_error, l.max_v_error});
    add(out, log, "exact_reproduction", rep.exact, "max nodal error " + sci(worst));
    return out;
  }
  const auto show = [](const std::optional<double>& x) { return x ? sci(*x) : std::string("undefined"); };
  add(out, log, "error_decay", rep.pass,
      std::string(rep.monotone ? "monotone" : "not monotone") + ", eoc rel_energy " + show(rep.eoc_rel_energy) +
          ", eoc grad_error " + show(rep.eoc_grad_error));
  if (cfg.check_consistency) {
    for (std::size_t i = 0; i < rep.eoc_c.size(); ++i)
      add(out, log, "consistency_C_" + rep.c_names[i], rep.eoc_c[i] && *rep.eoc_c[i] >= cfg.eoc_min_c,
          "eoc " + show(rep.eoc_c[i]) + " (required " + sci(cfg.eoc_min_c) + ")");
    for (std::size_t i = 0; i < rep.eoc_m.size(); ++i)
      add(out, log, "consistency_M_" + rep.m_names[i], rep.eoc_m[i] && *rep.eoc_m[i] >= cfg.eoc_min_m,
          "eoc " + show(rep.eoc_m[i]) + " (required " + sci(cfg.eoc_min_m) + ")");
  }
  return out;
}

}  // namespace crfv
