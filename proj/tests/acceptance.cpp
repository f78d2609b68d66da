// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "oracle.hpp"

#include "crfv/app.hpp"
#include "crfv/config.hpp"
#include "crfv/diagnostics.hpp"
#include "crfv/manufactured.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

using namespace crfv;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string sci(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3e", x);
  return b;
}

struct Rand {
  std::mt19937_64 rng;
  double u(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  int i(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }
  Vec3 vec(double s = 1.0) { return {u(-s, s), u(-s, s), u(-s, s)}; }
  Mat3 mat(double s = 1.0) {
    Mat3 m;
    for (int k = 0; k < 9; ++k) m(k / 3, k % 3) = u(-s, s);
    return m;
  }
  QField field(const TetMesh& m, double a, double b) {
    QField g(m);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = u(a, b);
    return g;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Smoke suite shared by criteria 1-3.

struct SmokeStats {
  int runs = 0;
  int steps = 0;
  int failures = 0;
  std::string first_failure;
  double min_rho = 1e300;
  double worst_mass_step = 0.0;  // residual / (10 eps_lin mass)
  double worst_slack = 1e300;    // min slack / scale, negative when violated
  double worst_monotone = -1e300; // max (E^k - E^{k-1}) / scale on u_B = 0 runs
  int rest_runs = 0;
  double cumulative = 0.0;  // 100-step relative cumulative mass residual
  double seconds = 0.0;
};

struct SmokeRun {
  std::unique_ptr<TetMesh> mesh;
  std::unique_ptr<Scheme> scheme;
  State init;
  TimeForcing forcing;
  Vec3 f0;
  bool rest = false;
};

SmokeRun random_run(Rand& R, bool rest) {
  SmokeRun s;
  s.rest = rest;
  s.mesh = std::make_unique<TetMesh>(oracle::random_mesh(R.rng, 384));
  const TetMesh& m = *s.mesh;
  const Vec3 a0 = R.vec(), k0 = R.vec(2.0);
  const Mat3 A = R.mat();
  const double rb = R.u(0.5, 2.0), amp = R.u(0.0, 0.4);
  const ScalarFunction r_b = [=](const Vec3& x) { return rb * (1.0 + amp * std::sin(k0.dot(x))); };
  const VectorFunction u_b = rest ? VectorFunction([](const Vec3&) { return Vec3(Vec3::Zero()); })
                                  : VectorFunction([=](const Vec3& x) { return Vec3(a0 + A * x); });
  SchemeParams p;
  p.dt = R.u(0.01, 0.2);
  p.mu = R.u(0.2, 2.0);
  p.lambda = R.u(-0.6 * p.mu, 1.0);
  p.law = PressureLaw::isentropic(R.u(0.5, 2.0), R.u(1.2, 3.0));
  p.law.set_structural(1.0 / (p.law.gamma() - 1.0), 1.0 / (p.law.gamma() - 1.0));
  p.reg.h = m.h();
  p.reg.kappa = R.i(0, 1);
  p.reg.kappa_tilde = R.i(0, 1);
  p.reg.omega = R.u(0.5, 1.5);
  do p.reg.eta = R.u(0.05, 0.95);
  while (!p.reg.range_warning().empty());
  p.exec = R.i(0, 1) ? Exec::Parallel : Exec::Serial;
  s.scheme = std::make_unique<Scheme>(m, BoundaryData::make(m, r_b, u_b), p);
  const Vec3 d0 = R.vec(), k1 = R.vec(3.0);
  const double r0 = R.u(0.5, 2.0);
  s.init = s.scheme->initial_state([=](const Vec3& x) { return r0 * (1.0 + 0.5 * std::sin(k1.dot(x))); },
                                   [=](const Vec3& x) { return Vec3(d0 * std::cos(k1.dot(x))); });
  if (!rest && R.i(0, 1)) {
    s.f0 = R.vec(2.0);
    const Vec3 f0 = s.f0;
    s.forcing = [f0](double, const Vec3&) { return f0; };
  }
  return s;
}

SmokeStats smoke_suite() {
  SmokeStats st;
  Rand R{std::mt19937_64(20240611)};
  const auto t0 = std::chrono::steady_clock::now();
  for (int run = 0; run < 60; ++run) {
    SmokeRun s = random_run(R, run % 5 == 4);
    Scheme& sc = *s.scheme;
    const auto& bd = sc.boundary();
    const auto& p = sc.params();
    const double scale = energy_scale(s.init, bd, p);
    ForcingLoad load;
    if (s.forcing) load = forcing_load(sc.mesh(), [&](const Vec3& x) { return s.forcing(0.0, x); });
    State prev = s.init;
    st.min_rho = std::min(st.min_rho, prev.rho.min());
    ++st.runs;
    st.rest_runs += s.rest;
    for (int k = 0; k < 10; ++k) {
      StepInfo info;
      State next;
      try {
        next = sc.step(prev, s.forcing ? &load : nullptr, &info);
      } catch (const std::exception& e) {
        ++st.failures;
        if (st.first_failure.empty()) st.first_failure = "run " + std::to_string(run) + ": " + e.what();
        break;
      }
      ++st.steps;
      st.min_rho = std::min({st.min_rho, info.min_rho, next.rho.min()});
      const MassStep ms = mass_step(next.rho, prev.rho, bd, p.dt);
      st.worst_mass_step =
          std::max(st.worst_mass_step, std::abs(ms.step_residual) / (10.0 * p.lin.tol * ms.mass));
      const EnergyLedger el = energy_step(prev, next, bd, p, s.forcing ? &load : nullptr);
      st.worst_slack = std::min(st.worst_slack, el.slack / scale);
      if (s.rest) st.worst_monotone = std::max(st.worst_monotone, (el.energy - el.energy_prev) / scale);
      prev = std::move(next);
    }
  }
  st.seconds = seconds_since(t0);

  // Long run for the cumulative mass balance.
  SmokeRun s = random_run(R, false);
  s.forcing = {};
  Trajectory traj = run(*s.scheme, s.init, 100);
  if (traj.failed) {
    ++st.failures;
    if (st.first_failure.empty()) st.first_failure = "100-step run: " + traj.failure;
    st.cumulative = 1e300;
  } else {
    const auto rows = mass_balance_residual(traj, s.scheme->boundary(), s.scheme->params().dt);
    for (const auto& r : rows) st.cumulative = std::max(st.cumulative, r.residual / rows.front().step.mass);
  }
  return st;
}

// ---------------------------------------------------------------------------
// Criterion 4: upwind identities against brute force.

Verdict upwind_identities() {
  Rand R{std::mt19937_64(4)};
  double w1 = 0.0, w2 = 0.0, w3 = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const TetMesh mesh = trial % 10 == 0 ? oracle::two_tets() : oracle::random_mesh(R.rng, 100);
    const oracle::Geometry G = oracle::build(mesh);
    const Vec3 a0 = R.vec();
    const Mat3 A = R.mat();
    const CRVecField ub = project_V(mesh, [&](const Vec3& x) { return Vec3(a0 + A * x); }, 2);
    CRVecField u = ub;
    for (int f : mesh.interior_faces()) u[static_cast<std::size_t>(f)] += R.vec();
    const QField g = R.field(mesh, -1.0, 2.0), r = R.field(mesh, -1.0, 2.0);
    const auto uf = [&](const oracle::Key& key) { return u.at(G.library_face.at(key)); };

    // Antisymmetry and the brute-force flux.
    double s1 = 0.0, r1 = 0.0;
    std::vector<double> F(4 * G.tets.size(), 0.0);  // |sigma| F_{sigma,K} per (K, local face)
    for (std::size_t k = 0; k < G.tets.size(); ++k) {
      const auto& t = G.tets[k];
      for (int i = 0; i < 4; ++i) {
        const auto& key = t.face[static_cast<std::size_t>(i)];
        if (!G.interior(key)) continue;
        const auto [l, j] = G.across(key, static_cast<int>(k));
        (void)j;
        const double a = uf(key).dot(t.normal[static_cast<std::size_t>(i)]);
        const double gup = a >= 0.0 ? g[k] : g.at(l);
        const double ref = gup * a;
        F[4 * k + static_cast<std::size_t>(i)] = t.area[static_cast<std::size_t>(i)] * ref;
        const double lib = flux(g, u, G.library_face.at(key), static_cast<int>(k));
        r1 = std::max(r1, std::abs(lib - ref));
        s1 = std::max(s1, std::abs(ref));
      }
    }
    for (const auto& [key, inc] : G.incident) {
      if (inc.size() != 2) continue;
      const int f = G.library_face.at(key);
      const auto& fa = mesh.face(f);
      r1 = std::max(r1, std::abs(flux(g, u, f, fa.owner) + flux(g, u, f, fa.neighbor)));
      const double v = u.at(f).dot(fa.normal);
      r1 = std::max(r1, std::abs(up_operator(g.at(fa.owner), g.at(fa.neighbor), v) +
                                 up_operator(g.at(fa.neighbor), g.at(fa.owner), -v)));
    }
    w1 = std::max(w1, r1 / std::max(1.0, s1));

    // Summation: element loop against face loop, both brute force, and the library face form.
    double lhs = 0.0, rhs = 0.0, lib = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < G.tets.size(); ++k)
      for (int i = 0; i < 4; ++i) {
        lhs += r[k] * F[4 * k + static_cast<std::size_t>(i)];
        s2 += std::abs(r[k] * F[4 * k + static_cast<std::size_t>(i)]);
      }
    const FaceVelocity un(u);
    for (const auto& [key, inc] : G.incident) {
      if (inc.size() != 2) continue;
      const auto [k1, i1] = inc[0];
      const int k2 = inc[1].first;
      const auto& t = G.tets[static_cast<std::size_t>(k1)];
      const double a = uf(key).dot(t.normal[static_cast<std::size_t>(i1)]);
      const double up = g.at(k1) * std::max(a, 0.0) + g.at(k2) * std::min(a, 0.0);
      rhs -= t.area[static_cast<std::size_t>(i1)] * up * (r.at(k2) - r.at(k1));
      const int f = G.library_face.at(key);
      lib -= mesh.face(f).area * up_flux(g, un, f) * jump_avg(r, f).jump;
    }
    w2 = std::max(w2, std::max(std::abs(lhs - rhs), std::abs(lhs - lib)) / std::max(1.0, s2));

    // Integration by parts with a quadratic test function, exact under both quadratures.
    const Vec3 pb = R.vec();
    const Mat3 P = R.mat();
    const double p0 = R.u(-1, 1);
    const ScalarFunction phi = [&](const Vec3& x) { return p0 + pb.dot(x) + x.dot(P * x); };
    const VectorFunction dphi = [&](const Vec3& x) { return Vec3(pb + (P + P.transpose()) * x); };
    double ol = 0.0, orr = 0.0, s3 = 0.0;
    const auto acc = [&](double& side, double v) {
      side += v;
      s3 += std::abs(v);
    };
    for (std::size_t k = 0; k < G.tets.size(); ++k) {
      const auto& t = G.tets[k];
      const double gk = g[k], rk = r[k];
      std::array<Vec3, 4> us;
      for (int i = 0; i < 4; ++i) us[static_cast<std::size_t>(i)] = uf(t.face[static_cast<std::size_t>(i)]);
      const auto uK = [&](const Vec3& x) {
        Vec3 v = Vec3::Zero();
        for (int i = 0; i < 4; ++i) v += oracle::cr_basis(t, i, x) * us[static_cast<std::size_t>(i)];
        return v;
      };
      double div = 0.0;
      for (int i = 0; i < 4; ++i)
        div += t.area[static_cast<std::size_t>(i)] * us[static_cast<std::size_t>(i)].dot(t.normal[static_cast<std::size_t>(i)]);
      div /= t.volume;
      acc(ol, gk * oracle::tet_integral(t, [&](const Vec3& x) { return uK(x).dot(dphi(x)); }));
      acc(orr, gk * div * oracle::tet_integral(t, [&](const Vec3& x) { return rk - phi(x); }));
      for (int i = 0; i < 4; ++i) {
        const auto si = static_cast<std::size_t>(i);
        const Vec3 n = t.normal[si];
        acc(orr, gk * oracle::face_integral(t, i, [&](const Vec3& x) { return (uK(x) - us[si]).dot(n) * (phi(x) - rk); }));
        const double a = us[si].dot(n);
        if (!G.interior(t.face[si])) {
          acc(orr, gk * a * oracle::face_integral(t, i, [&](const Vec3& x) { return phi(x) - rk; }));
          continue;
        }
        const int l = G.across(t.face[si], static_cast<int>(k)).first;
        acc(orr, -F[4 * k + si] * rk);
        acc(orr, (g.at(l) - gk) * std::min(a, 0.0) * oracle::face_integral(t, i, [&](const Vec3& x) { return rk - phi(x); }));
      }
    }
    const double libres = discrete_ibp_residual(g, r, u, ub, phi, dphi, 4);
    w3 = std::max(w3, std::max(std::abs(ol - orr), std::abs(libres)) / std::max(1.0, s3));
  }
  Verdict v;
  v.pass = w1 <= 1e-12 && w2 <= 1e-12 && w3 <= 1e-10;
  v.detail = "200 trials, rel residual antisymmetry " + sci(w1) + ", summation " + sci(w2) + ", integration by parts " + sci(w3);
  return v;
}

// ---------------------------------------------------------------------------
// Criterion 5: CR divergence and gradient commutation against exact integrals.

Verdict cr_identities() {
  Rand R{std::mt19937_64(5)};
  double wv = 0.0, wp = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const TetMesh mesh = trial % 10 == 0 ? oracle::two_tets() : oracle::random_mesh(R.rng, 100);
    const oracle::Geometry G = oracle::build(mesh);
    const Vec3 b = R.vec(), c = R.vec();
    const Mat3 B = R.mat();
    const VectorFunction uq = [&](const Vec3& x) { return Vec3(b + B * x + c.cwiseProduct(x.cwiseProduct(x))); };
    const ScalarFunction divq = [&](const Vec3& x) { return B.trace() + 2.0 * c.dot(x); };
    const Vec3 pb = R.vec();
    const Mat3 P = R.mat();
    const ScalarFunction pq = [&](const Vec3& x) { return pb.dot(x) + x.dot(P * x); };
    const VectorFunction gpq = [&](const Vec3& x) { return Vec3(pb + (P + P.transpose()) * x); };
    const CRVecField ut = project_V(mesh, uq, 2);
    const CRField pt = project_V(mesh, pq, 2);
    const QField w = R.field(mesh, -1.0, 1.0);
    const Vec3 wv3 = R.vec();

    // Face means agree with the oracle quadrature.
    double rv = 0.0, sv = 0.0, rp = 0.0, sp = 0.0;
    for (std::size_t k = 0; k < G.tets.size(); ++k) {
      const auto& t = G.tets[k];
      for (int i = 0; i < 4; ++i) {
        const auto si = static_cast<std::size_t>(i);
        const int f = G.library_face.at(t.face[si]);
        Vec3 um = Vec3::Zero();
        for (int d = 0; d < 3; ++d) um[d] = oracle::face_integral(t, i, [&](const Vec3& x) { return uq(x)[d]; });
        um /= t.area[si];
        const double pm = oracle::face_integral(t, i, pq) / t.area[si];
        rv = std::max(rv, (ut.at(f) - um).cwiseAbs().maxCoeff());
        rp = std::max(rp, std::abs(pt.at(f) - pm));
      }
    }
    // int w div_h Pi^V u = int w div u, and int grad_h Pi^V phi . v = int grad phi . v.
    double lv = 0.0, ov = 0.0, lp = 0.0, op = 0.0;
    for (std::size_t k = 0; k < G.tets.size(); ++k) {
      const auto& t = G.tets[k];
      const int kk = static_cast<int>(k);
      const double l1 = w[k] * mesh.volume(kk) * div_h(ut, kk), o1 = w[k] * oracle::tet_integral(t, divq);
      lv += l1;
      ov += o1;
      sv += std::abs(o1);
      const double l2 = mesh.volume(kk) * grad_h(pt, kk).dot(w[k] * wv3);
      const double o2 = oracle::tet_integral(t, [&](const Vec3& x) { return gpq(x).dot(w[k] * wv3); });
      lp += l2;
      op += o2;
      sp += std::abs(o2);
    }
    wv = std::max({wv, rv / std::max(1.0, sv), std::abs(lv - ov) / std::max(1.0, sv)});
    wp = std::max({wp, rp / std::max(1.0, sp), std::abs(lp - op) / std::max(1.0, sp)});
  }
  Verdict v;
  v.pass = wv <= 1e-12 && wp <= 1e-12;
  v.detail = "100 trials, rel residual divergence " + sci(wv) + ", gradient " + sci(wp);
  return v;
}

// ---------------------------------------------------------------------------
// Criterion 6: renormalized continuity with B = rho^2 on two tets.

Verdict renormalized() {
  Rand R{std::mt19937_64(6)};
  const TetMesh mesh = oracle::two_tets();
  const oracle::Geometry G = oracle::build(mesh);
  double worst = 0.0, worst_ent = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 a0 = R.vec();
    const Mat3 A = R.mat();
    QField rb = R.field(mesh, 0.5, 2.0);
    CRVecField ub = project_V(mesh, [&](const Vec3& x) { return Vec3(a0 + A * x); }, 2);
    const BoundaryData bd = BoundaryData::make(rb, ub);
    CRVecField u = ub;
    for (int f : mesh.interior_faces()) u[static_cast<std::size_t>(f)] += R.vec();
    const QField rho = R.field(mesh, 0.2, 3.0), prev = R.field(mesh, 0.2, 3.0);
    SchemeParams p;
    p.dt = R.u(0.01, 1.0);
    p.reg.h = mesh.h();
    p.reg.kappa = R.i(0, 1);
    p.reg.omega = R.u(0.5, 1.5);
    const double diff = p.reg.kappa * std::pow(p.reg.h, p.reg.omega);
    const auto lib = renormalized_continuity_residual(
        rho, prev, u, bd, p, [](double x) { return x * x; }, [](double x) { return 2.0 * x; });

    for (std::size_t k = 0; k < 2; ++k) {
      const auto& t = G.tets[k];
      const double rk = rho[k], rp = prev[k];
      double div = 0.0;
      for (int i = 0; i < 4; ++i)
        div += t.area[static_cast<std::size_t>(i)] * u.at(G.library_face.at(t.face[static_cast<std::size_t>(i)])).dot(t.normal[static_cast<std::size_t>(i)]);
      double lhs = t.volume * (rk * rk - rp * rp) / p.dt + t.volume * (rp - rk) * (rp - rk) / p.dt + rk * rk * div;
      double rhs = 0.0, row = t.volume * (rk - rp) / p.dt, scale = std::abs(t.volume * rk * rk / p.dt);
      for (int i = 0; i < 4; ++i) {
        const auto si = static_cast<std::size_t>(i);
        const double a = u.at(G.library_face.at(t.face[si])).dot(t.normal[si]), s = t.area[si];
        if (G.interior(t.face[si])) {
          const double rl = rho.at(G.across(t.face[si], static_cast<int>(k)).first);
          const double up = a >= 0.0 ? rk : rl;
          lhs += s * up * up * a + (a < 0.0 ? s * std::abs(a) * (up - rk) * (up - rk) : 0.0) +
                 diff * s * (rk - rl) * 2.0 * rk;
          row += s * up * a + diff * s * (rk - rl);
        } else if (a < 0.0) {
          const double rB = rb[k];
          lhs += s * std::abs(a) * (rB - rk) * (rB - rk);
          rhs += s * std::abs(a) * rB * rB;
          row += s * rB * a;
        } else {
          lhs += s * rk * rk * a;
          row += s * rk * a;
        }
        scale = std::max(scale, std::abs(s * a) * 9.0);
      }
      const double oracle_res = lhs - rhs;
      worst = std::max({worst, std::abs(lib.residual[k] - oracle_res) / scale,
                        std::abs(oracle_res - 2.0 * rk * row) / scale});
      worst_ent = std::min({worst_ent, lib.time_entropy[k], lib.face_entropy[k], lib.inflow_entropy[k]});
    }
  }
  Verdict v;
  v.pass = worst <= 1e-10 && worst_ent >= -1e-12;
  v.detail = "200 trials, rel residual " + sci(worst) + ", min E_B term " + sci(worst_ent);
  return v;
}

// ---------------------------------------------------------------------------
// Criterion 7: projection orders.

Verdict projection_eoc() {
  using std::numbers::pi;
  const ScalarFunction f = [](const Vec3& x) {
    return std::sin(pi * x[0]) * std::cos(2.0 * x[1]) * std::exp(x[2]) + x[0] * x[1];
  };
  std::vector<double> hs, eq, ev;
  for (int n : {4, 8, 12, 16}) {
    const TetMesh mesh = structured_box_mesh(n, n, n);
    const QField q = project_Q(mesh, f, 4);
    const CRField v = project_V(mesh, f, 4);
    double l1 = 0.0, l2 = 0.0;
    for (std::size_t kk = 0; kk < mesh.num_elements(); ++kk) {
      const int k = static_cast<int>(kk);
      l1 += integrate_element(mesh, k, [&](const Vec3& x) { return std::abs(f(x) - q[kk]); }, 6);
      l2 += integrate_element(mesh, k, [&](const Vec3& x) { return std::pow(f(x) - evaluate(v, k, x), 2); }, 6);
    }
    hs.push_back(mesh.h());
    eq.push_back(l1);
    ev.push_back(std::sqrt(l2));
  }
  const double oq = eoc(eq, hs), ov = eoc(ev, hs);
  Verdict v;
  v.pass = oq >= 0.9 && oq <= 1.2 && ov >= 1.8 && ov <= 2.2;
  v.detail = "n = 4 8 12 16, EOC Pi^Q L1 " + sci(oq) + ", Pi^V L2 " + sci(ov);
  return v;
}

// ---------------------------------------------------------------------------
// Criteria 8 and 9: the forced vortex study and the exact cases.

RunConfig vortex_config() {
  return load_config(
      "case = vortex\nmesh.n = 4\ntime.T = 0.5\ntime.dt_factor = 1\ngamma = 2\nmu = 1\nlambda = 0\n"
      "reg.kappa = 0\nreg.kappa_tilde = 1\nreg.eta = 0.4\n");
}

StudyOptions study_options(const RunConfig& cfg) {
  StudyOptions o;
  o.params = cfg.scheme_params(1.0);
  o.dt_factor = cfg.dt_factor;
  o.degree = cfg.quad_degree;
  o.exact_tol = 10.0 * cfg.fp_tol;
  return o;
}

std::string show(const std::optional<double>& x) { return x ? sci(*x) : "undefined"; }

Verdict consistency_eoc(const ConvergenceReport& rep, double seconds) {
  Verdict v;
  v.pass = !rep.failed && seconds < 600.0;
  std::ostringstream os;
  os << "levels 4 6 8 12 in " << sci(seconds) << " s;";
  for (std::size_t i = 0; i < rep.eoc_c.size(); ++i) {
    v.pass = v.pass && rep.eoc_c[i] && *rep.eoc_c[i] >= 0.25;
    os << " C_" << rep.c_names[i] << " " << show(rep.eoc_c[i]);
  }
  for (std::size_t i = 0; i < rep.eoc_m.size(); ++i) {
    v.pass = v.pass && rep.eoc_m[i] && *rep.eoc_m[i] >= 0.15;
    os << " M_" << rep.m_names[i] << " " << show(rep.eoc_m[i]);
  }
  v.detail = os.str();
  return v;
}

Verdict error_decay(const ConvergenceReport& rep) {
  Verdict v;
  const auto cfg = load_config(
      "case = transport\ncase.rho = 1.3\ncase.u = 0.5 0.2 0\nmesh.n = 3\ntime.T = 0.5\n"
      "reg.kappa = 1\nreg.kappa_tilde = 1\nreg.eta = 0.5\n");
  StudyOptions o = study_options(cfg);
  o.consistency = false;
  const auto a = convergence_study(cfg.make_case(), {2, 3, 4}, o);
  const auto b =
      convergence_study(case_constant(cfg.mu, cfg.lambda, cfg.law(), 0.8), {2, 3, 4}, o);
  double wa = 0.0, wb = 0.0;
  for (const auto& l : a.levels) wa = std::max({wa, l.max_rho_error, l.max_v_error});
  for (const auto& l : b.levels) wb = std::max({wb, l.max_rho_error, l.max_v_error});
  v.pass = rep.pass && rep.monotone && rep.levels.size() >= 3 && rep.eoc_rel_energy && *rep.eoc_rel_energy > 0.0 &&
           rep.eoc_grad_error && *rep.eoc_grad_error > 0.0 && a.exact && b.exact;
  v.detail = std::string(rep.monotone ? "monotone" : "not monotone") + ", EOC E_h " + show(rep.eoc_rel_energy) +
             ", EOC grad " + show(rep.eoc_grad_error) + "; exact cases max error " + sci(std::max(wa, wb));
  return v;
}

// ---------------------------------------------------------------------------
// Criterion 10: byte-identical ledgers.

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

Verdict determinism() {
  const fs::path base = fs::temp_directory_path() / "crfv_acceptance_determinism";
  fs::remove_all(base);
  std::vector<fs::path> dirs{base / "a", base / "b"};
  for (const auto& d : dirs) {
    RunConfig cfg = load_config(
        "case = vortex\nmesh.n = 3\ntime.T = 0.2\ntime.dt = 0.05\nreg.kappa = 1\nreg.kappa_tilde = 1\n"
        "output.vtk_every = 2\n");
    cfg.output_dir = d.string();
    std::ostringstream log;
    run_solve(cfg, log);
  }
  int files = 0;
  bool same = true;
  std::string diff;
  for (const auto& e : fs::directory_iterator(dirs[0])) {
    ++files;
    const fs::path other = dirs[1] / e.path().filename();
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) {
      same = false;
      diff = e.path().filename().string();
    }
  }
  int others = 0;
  for (const auto& e : fs::directory_iterator(dirs[1])) (void)e, ++others;
  same = same && files == others && files > 0;
  fs::remove_all(base);
  Verdict v;
  v.pass = same;
  v.detail = std::to_string(files) + " files compared" + (diff.empty() ? "" : ", differs: " + diff);
  return v;
}

}  // namespace

int main() {
  int failed = 0;
  const auto report = [&](int id, const std::string& name, const Verdict& v) {
    std::printf("criterion %2d %-26s %s  %s\n", id, name.c_str(), v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  };

  const SmokeStats st = smoke_suite();
  {
    Verdict v;
    v.pass = st.failures == 0 && st.runs >= 50 && st.min_rho > 0.0 && st.seconds < 120.0;
    v.detail = std::to_string(st.runs) + " runs, " + std::to_string(st.steps) + " steps in " + sci(st.seconds) +
               " s, min rho " + sci(st.min_rho) + (st.failures ? ", failure: " + st.first_failure : "");
    report(1, "positivity", v);
  }
  {
    Verdict v;
    v.pass = st.failures == 0 && st.worst_mass_step <= 1.0 && st.cumulative <= 1e-9;
    v.detail = "max step residual / (10 eps_lin M) " + sci(st.worst_mass_step) + ", 100-step cumulative " +
               sci(st.cumulative);
    report(2, "mass", v);
  }
  {
    Verdict v;
    v.pass = st.failures == 0 && st.worst_slack >= -1e-8 && st.worst_monotone <= 1e-8 && st.rest_runs > 0;
    v.detail = "min slack / E0 " + sci(st.worst_slack) + ", max increase / E0 with u_B = 0 " +
               sci(st.worst_monotone) + " over " + std::to_string(st.rest_runs) + " runs";
    report(3, "energy", v);
  }
  report(4, "upwind identities", upwind_identities());
  report(5, "CR commutation", cr_identities());
  report(6, "renormalized continuity", renormalized());
  report(7, "projection EOC", projection_eoc());

  const RunConfig cfg = vortex_config();
  const auto t0 = std::chrono::steady_clock::now();
  const ConvergenceReport rep = convergence_study(cfg.make_case(), {4, 6, 8, 12}, study_options(cfg));
  const double secs = seconds_since(t0);
  report(8, "consistency EOC", consistency_eoc(rep, secs));
  report(9, "error decay", error_decay(rep));
  report(10, "determinism", determinism());

  std::printf("%d of 10 criteria failed\n", failed);
  return failed ? 1 : 0;
}
