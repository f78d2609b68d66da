#include "crfv/manufactured.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace crfv {

namespace {

using std::numbers::pi;

// s(t) = t^2 (1 - t)^2 and its first three derivatives.
std::array<double, 4> bump(double t) {
  return {t * t * (1 - t) * (1 - t), 2 * t - 6 * t * t + 4 * t * t * t, 2 - 12 * t + 12 * t * t, -12 + 24 * t};
}

struct VortexFields {
  double r;
  Vec3 grad_r;
  Vec3 c;      // curl(0, 0, w)
  Mat3 grad_c; // (i, j) = d_j c_i
  Vec3 lap_c;
  Vec3 g;      // grad(1/r)
  Mat3 hess;   // hess(1/r)
};

VortexFields vortex_fields(const Vec3& x, double rho_bar, double delta) {
  const auto sx = bump(x[0]), sy = bump(x[1]), sz = bump(x[2]);
  const auto D = [&](int a, int b, int c) {
    return sx[static_cast<std::size_t>(a)] * sy[static_cast<std::size_t>(b)] * sz[static_cast<std::size_t>(c)];
  };
  VortexFields v;
  v.c = Vec3(D(0, 1, 0), -D(1, 0, 0), 0.0);
  v.grad_c << D(1, 1, 0), D(0, 2, 0), D(0, 1, 1), -D(2, 0, 0), -D(1, 1, 0), -D(1, 0, 1), 0, 0, 0;
  v.lap_c = Vec3(D(2, 1, 0) + D(0, 3, 0) + D(0, 1, 2), -(D(3, 0, 0) + D(1, 2, 0) + D(1, 0, 2)), 0.0);

  const double Sy = std::sin(pi * x[1]), Cy = std::cos(pi * x[1]);
  const double Sz = std::sin(pi * x[2]), Cz = std::cos(pi * x[2]);
  const double a = rho_bar * delta;
  v.r = rho_bar + a * Sy * Sz;
  v.grad_r = Vec3(0.0, a * pi * Cy * Sz, a * pi * Sy * Cz);
  Mat3 hr = Mat3::Zero();
  hr(1, 1) = hr(2, 2) = -a * pi * pi * Sy * Sz;
  hr(1, 2) = hr(2, 1) = a * pi * pi * Cy * Cz;
  const double r2 = v.r * v.r;
  v.g = -v.grad_r / r2;
  v.hess = -hr / r2 + 2.0 * v.grad_r * v.grad_r.transpose() / (r2 * v.r);
  return v;
}

}  // namespace

ManufacturedCase case_constant(double mu, double lambda, const PressureLaw& law, double rho_bar) {
  ManufacturedCase c;
  c.name = "constant";
  c.mu = mu;
  c.lambda = lambda;
  c.law = law;
  c.T = 0.5;
  c.r = [rho_bar](double, const Vec3&) { return rho_bar; };
  c.V = [](double, const Vec3&) { return Vec3(Vec3::Zero()); };
  c.r_b = [rho_bar](const Vec3&) { return rho_bar; };
  c.u_b = [](const Vec3&) { return Vec3(Vec3::Zero()); };
  c.mass_source = [](double, const Vec3&) { return 0.0; };
  c.exact = true;
  return c;
}

ManufacturedCase case_transport(double mu, double lambda, const PressureLaw& law, double rho_bar, const Vec3& u_bar) {
  ManufacturedCase c = case_constant(mu, lambda, law, rho_bar);
  c.name = "transport";
  c.u_b = [u_bar](const Vec3&) { return u_bar; };
  return c;
}

ManufacturedCase case_vortex(double mu, double lambda, const PressureLaw& law, const CaseCOptions& opt) {
  ManufacturedCase c;
  c.name = "vortex";
  c.mu = mu;
  c.lambda = lambda;
  c.law = law;
  c.T = opt.T;
  const double rb = opt.rho_bar, dl = opt.delta, ub = opt.u_bar, q0 = opt.q0;
  const auto q = [q0](double t) { return q0 * std::sin(pi * t); };
  const auto dq = [q0](double t) { return q0 * pi * std::cos(pi * t); };

  c.r = [rb, dl](double, const Vec3& x) { return rb * (1.0 + dl * std::sin(pi * x[1]) * std::sin(pi * x[2])); };
  c.r_b = [rb, dl](const Vec3& x) { return rb * (1.0 + dl * std::sin(pi * x[1]) * std::sin(pi * x[2])); };
  c.u_b = [ub](const Vec3&) { return Vec3(ub, 0.0, 0.0); };
  c.V = [=](double t, const Vec3& x) {
    const auto f = vortex_fields(x, rb, dl);
    return Vec3(q(t) * f.c / f.r);
  };
  // r U = r u_bar e_x + q curl(0,0,w) with r independent of x and t: both parts are divergence free.
  c.mass_source = [](double, const Vec3&) { return 0.0; };
  c.forcing = [=](double t, const Vec3& x) {
    const auto f = vortex_fields(x, rb, dl);
    const double qt = q(t), ri = 1.0 / f.r;
    const Vec3 V = qt * ri * f.c;
    const Vec3 U = V + Vec3(ub, 0.0, 0.0);
    const Mat3 gV = qt * (ri * f.grad_c + f.c * f.g.transpose());
    const Vec3 lap = qt * (ri * f.lap_c + 2.0 * f.grad_c * f.g + f.c * f.hess.trace());
    const Vec3 grad_div = qt * (f.grad_c.transpose() * f.g + f.hess * f.c);
    return Vec3(dq(t) * f.c + f.r * (gV * U) + law.dp(f.r) * f.grad_r - mu * lap - (mu + lambda) * grad_div);
  };
  return c;
}

std::vector<ManufacturedCase> builtin_cases(double mu, double lambda, const PressureLaw& law) {
  return {case_constant(mu, lambda, law), case_transport(mu, lambda, law), case_vortex(mu, lambda, law)};
}

ManufacturedCase builtin_case(const std::string& name, double mu, double lambda, const PressureLaw& law) {
  if (name == "constant") return case_constant(mu, lambda, law);
  if (name == "transport") return case_transport(mu, lambda, law);
  if (name == "vortex") return case_vortex(mu, lambda, law);
  throw std::invalid_argument("unknown manufactured case '" + name + "' (expected constant, transport or vortex)");
}

LevelResult run_level(const ManufacturedCase& c, int n, const StudyOptions& opt, Trajectory* keep) {
  const auto t0 = std::chrono::steady_clock::now();
  const TetMesh mesh = structured_box_mesh(n, n, n, c.box);
  LevelResult res;
  res.n = n;
  res.h = mesh.h();
  res.elements = mesh.num_elements();
  res.steps = std::max(1, static_cast<int>(std::lround(c.T / (opt.dt_factor * res.h))));
  res.dt = c.T / res.steps;

  SchemeParams p = opt.params;
  p.dt = res.dt;
  p.mu = c.mu;
  p.lambda = c.lambda;
  p.law = c.law;
  p.reg.h = res.h;

  const BoundaryData bd = BoundaryData::make(mesh, c.r_b, c.u_b, opt.degree);
  Scheme scheme(mesh, bd, p);
  const State init = scheme.initial_state([&](const Vec3& x) { return c.r(0.0, x); },
                                          [&](const Vec3& x) { return c.U(0.0, x); }, opt.degree);
  Trajectory traj = run(scheme, init, res.steps, {}, c.forcing);
  res.failed = traj.failed;
  res.failure = traj.failure;

  const ReferenceSolution ref = c.reference();
  const auto rows = error_vs_reference(traj, bd, p, ref, opt.degree);
  res.rel_energy = rows.back().rel_energy_h;
  res.grad_error = rows.back().cumulative_h1;
  res.velocity_error = rows.back().cumulative_l2;
  for (const State& s : traj.states) {
    const QField r = project_Q(mesh, [&](const Vec3& x) { return c.r(s.t, x); }, opt.degree);
    const CRVecField U = project_V(mesh, [&](const Vec3& x) { return c.U(s.t, x); }, opt.degree);
    for (std::size_t k = 0; k < r.size(); ++k) res.max_rho_error = std::max(res.max_rho_error, std::abs(s.rho[k] - r[k]));
    for (std::size_t f = 0; f < U.size(); ++f)
      res.max_v_error = std::max(res.max_v_error, (s.u[f] - U[f]).cwiseAbs().maxCoeff());
  }

  if (opt.consistency) {
    const auto cc = continuity_test_catalog();
    const auto mc = momentum_test_catalog(c.box);
    res.consistency_c.assign(cc.size(), 0.0);
    res.consistency_m.assign(mc.size(), 0.0);
    for (std::size_t k = 1; k < traj.states.size(); ++k) {
      const State& prev = traj.states[k - 1];
      const State& next = traj.states[k];
      VectorFunction f;
      if (c.forcing) f = [&](const Vec3& x) { return c.forcing(next.t, x); };
      for (std::size_t i = 0; i < cc.size(); ++i)
        res.consistency_c[i] += p.dt * std::abs(consistency_residual_continuity(prev, next, bd, p, cc[i], opt.degree));
      for (std::size_t i = 0; i < mc.size(); ++i)
        res.consistency_m[i] += p.dt * std::abs(consistency_residual_momentum(prev, next, bd, p, mc[i],
                                                                             c.forcing ? &f : nullptr, opt.degree));
    }
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (keep != nullptr) *keep = std::move(traj);
  return res;
}

namespace {

std::optional<double> safe_eoc(const std::vector<LevelResult>& lv, double LevelResult::*field) {
  std::vector<double> v, h;
  for (const auto& l : lv) {
    if (l.failed || !(l.*field > 0.0)) return std::nullopt;
    v.push_back(l.*field);
    h.push_back(l.h);
  }
  if (v.size() < 2) return std::nullopt;
  return eoc(v, h);
}

std::optional<double> safe_eoc(const std::vector<LevelResult>& lv, std::vector<double> LevelResult::*field,
                               std::size_t i) {
  std::vector<double> v, h;
  for (const auto& l : lv) {
    const auto& vals = l.*field;
    if (l.failed || i >= vals.size() || !(vals[i] > 0.0)) return std::nullopt;
    v.push_back(vals[i]);
    h.push_back(l.h);
  }
  if (v.size() < 2) return std::nullopt;
  return eoc(v, h);
}

}  // namespace

ConvergenceReport convergence_study(const ManufacturedCase& c, const std::vector<int>& levels,
                                    const StudyOptions& opt) {
  if (levels.size() < 2) throw std::invalid_argument("convergence study needs at least two levels");
  ConvergenceReport rep;
  rep.case_name = c.name;
  for (const auto& t : continuity_test_catalog()) rep.c_names.push_back(t.name);
  for (const auto& t : momentum_test_catalog(c.box)) rep.m_names.push_back(t.name);
  for (int n : levels) {
    rep.levels.push_back(run_level(c, n, opt));
    if (rep.levels.back().failed) {
      rep.failed = true;
      break;
    }
  }

  rep.exact = !rep.failed;
  for (const auto& l : rep.levels)
    rep.exact = rep.exact && l.max_rho_error <= opt.exact_tol && l.max_v_error <= opt.exact_tol;

  rep.eoc_rel_energy = safe_eoc(rep.levels, &LevelResult::rel_energy);
  rep.eoc_grad_error = safe_eoc(rep.levels, &LevelResult::grad_error);
  if (opt.consistency) {
    for (std::size_t i = 0; i < rep.c_names.size(); ++i)
      rep.eoc_c.push_back(safe_eoc(rep.levels, &LevelResult::consistency_c, i));
    for (std::size_t i = 0; i < rep.m_names.size(); ++i)
      rep.eoc_m.push_back(safe_eoc(rep.levels, &LevelResult::consistency_m, i));
  }

  rep.monotone = !rep.failed;
  for (std::size_t i = 1; i < rep.levels.size(); ++i) {
    rep.monotone = rep.monotone && rep.levels[i].rel_energy < rep.levels[i - 1].rel_energy &&
                   rep.levels[i].grad_error < rep.levels[i - 1].grad_error;
  }
  if (c.exact) rep.pass = rep.exact;
  else rep.pass = rep.monotone && rep.eoc_rel_energy && *rep.eoc_rel_energy > 0.0 && rep.eoc_grad_error &&
                  *rep.eoc_grad_error > 0.0;
  return rep;
}

}  // namespace crfv
