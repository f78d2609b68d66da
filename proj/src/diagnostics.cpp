#include "crfv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace crfv {

MassStep mass_step(const QField& rho, const QField& rho_prev, const BoundaryData& bd, double dt) {
  const TetMesh& mesh = rho.mesh();
  MassStep m;
  m.mass = rho.integral();
  for (int f : mesh.boundary_faces()) {
    const Face& face = mesh.face(f);
    const double b = face.area * bd.u_b.at(f).dot(face.normal);
    if (bd.cls.is_inflow(f)) m.inflow -= dt * bd.rho_b.at(face.owner) * b;
    else m.outflow += dt * rho.at(face.owner) * b;
  }
  m.step_residual = m.mass - rho_prev.integral() + m.outflow - m.inflow;
  return m;
}

std::vector<MassLedgerRow> mass_balance_residual(const Trajectory& traj, const BoundaryData& bd, double dt) {
  std::vector<MassLedgerRow> rows;
  if (traj.states.empty()) return rows;
  const double m0 = traj.states.front().rho.integral();
  MassLedgerRow r0;
  r0.step.mass = m0;
  rows.push_back(r0);
  double out = 0.0, in = 0.0;
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    MassLedgerRow r;
    r.k = traj.states[k].k;
    r.t = traj.states[k].t;
    r.step = mass_step(traj.states[k].rho, traj.states[k - 1].rho, bd, dt);
    out += r.step.outflow;
    in += r.step.inflow;
    r.cumulative_outflow = out;
    r.cumulative_inflow = in;
    r.residual = std::abs(r.step.mass + out - m0 - in);
    rows.push_back(r);
  }
  return rows;
}

double EnergyLedger::min_dissipation() const {
  return std::min({viscous, time_dissipation, upwind_dissipation, upwind_entropy, diffusion_entropy, outflow_kinetic,
                   inflow_entropy});
}

namespace {

double frobenius_viscous(const Mat3& a, const Mat3& b, double mu, double lambda) {
  return mu * (a.array() * b.array()).sum() + (mu + lambda) * a.trace() * b.trace();
}

}  // namespace

EnergyLedger energy_step(const State& prev, const State& next, const BoundaryData& bd, const SchemeParams& params,
                         const ForcingLoad* f) {
  const TetMesh& mesh = next.rho.mesh();
  const PressureLaw& law = params.law;
  const RegularizationParams& reg = params.reg;
  const double dt = params.dt, mu = params.mu, lambda = params.lambda;
  const double diff = reg.diffusion_coefficient();
  const Exec exec = params.exec;

  const CRVecField v = next.v(bd), v_prev = prev.v(bd);
  std::vector<Vec3> vh, vh_prev;
  kernels::element_means(v, vh, exec);
  kernels::element_means(v_prev, vh_prev, exec);
  std::vector<Mat3> gv;
  kernels::element_gradients(v, gv, exec);
  const QField& rho = next.rho;
  const QField& rho_prev = prev.rho;

  EnergyLedger e;
  const auto now = kernels::energy(rho, vh, law, reg, exec);
  const auto before = kernels::energy(rho_prev, vh_prev, law, reg, exec);
  e.kinetic = now.kinetic;
  e.internal = now.internal;
  e.energy = now.kinetic + now.internal;
  e.energy_prev = before.kinetic + before.internal;

  const auto Hh = [&](double r) { return H_h(law, reg, r); };
  const auto dHh = [&](double r) { return dH_h(law, reg, r); };
  const auto EHh = [&](double a, double b) { return rel_entropy_B(Hh, dHh, a, b); };

  const std::size_t ne = mesh.num_elements();
  e.viscous = dt * kernels::chunked_sum(
                       ne,
                       [&](std::size_t k) {
                         return mesh.volume(static_cast<int>(k)) * frobenius_viscous(gv[k], gv[k], mu, lambda);
                       },
                       exec);
  e.time_dissipation = kernels::chunked_sum(
      ne,
      [&](std::size_t k) {
        return mesh.volume(static_cast<int>(k)) *
               (0.5 * rho_prev[k] * (vh[k] - vh_prev[k]).squaredNorm() + EHh(rho_prev[k], rho[k]));
      },
      exec);
  e.boundary_viscous = -dt * kernels::chunked_sum(
                                 ne,
                                 [&](std::size_t k) {
                                   return mesh.volume(static_cast<int>(k)) *
                                          frobenius_viscous(bd.grad_u_b[k], gv[k], mu, lambda);
                                 },
                                 exec);
  e.boundary_pressure = -dt * kernels::chunked_sum(
                                  ne,
                                  [&](std::size_t k) {
                                    return mesh.volume(static_cast<int>(k)) * p_h(law, reg, rho[k]) *
                                           bd.grad_u_b[k].trace();
                                  },
                                  exec);
  e.boundary_convective = -dt * kernels::chunked_sum(
                                    ne,
                                    [&](std::size_t k) {
                                      const Vec3 uh = vh[k] + bd.mean_u_b[k];
                                      return mesh.volume(static_cast<int>(k)) * rho[k] *
                                             vh[k].dot(bd.grad_u_b[k] * uh);
                                    },
                                    exec);
  if (f != nullptr) {
    e.forcing_work = dt * kernels::chunked_sum(ne, [&](std::size_t k) { return vh[k].dot((*f)[k]); }, exec);
  }

  const FaceVelocity un(next.u);
  for (int fs : mesh.interior_faces()) {
    const Face& face = mesh.face(fs);
    const double a = un[static_cast<std::size_t>(fs)];
    const int up = a >= 0.0 ? face.owner : face.neighbor;
    const int down = a >= 0.0 ? face.neighbor : face.owner;
    const auto K = static_cast<std::size_t>(face.owner), L = static_cast<std::size_t>(face.neighbor);
    e.upwind_dissipation += 0.5 * dt * face.area * rho.at(up) * std::abs(a) * (vh[L] - vh[K]).squaredNorm();
    e.upwind_entropy += dt * face.area * std::abs(a) * EHh(rho.at(up), rho.at(down));
    e.diffusion_entropy += dt * diff * face.area * (rho[L] - rho[K]) * (dHh(rho[L]) - dHh(rho[K]));
  }
  for (int fs : mesh.boundary_faces()) {
    const Face& face = mesh.face(fs);
    const auto k = static_cast<std::size_t>(face.owner);
    const double b = bd.u_b.at(fs).dot(face.normal);
    if (bd.cls.is_inflow(fs)) {
      const double rb = bd.rho_b[k];
      e.inflow_entropy += dt * face.area * std::abs(b) * EHh(rb, rho[k]);
      e.inflow_internal += dt * face.area * std::abs(b) * Hh(rb);
      e.inflow_kinetic += 0.5 * dt * face.area * std::abs(b) * rb * vh[k].squaredNorm();
    } else {
      e.outflow_internal += dt * face.area * b * Hh(rho[k]);
      e.outflow_kinetic += 0.5 * dt * face.area * b * rho[k] * vh[k].squaredNorm();
    }
  }

  const double dE = e.energy - e.energy_prev;
  e.slack = e.rhs() - (dE + e.viscous + e.outflow_internal);
  e.identity_residual = dE + e.viscous + e.time_dissipation + e.upwind_dissipation + e.upwind_entropy +
                        e.diffusion_entropy + e.outflow_internal + e.outflow_kinetic + e.inflow_entropy - e.rhs();
  return e;
}

double energy_scale(const State& s, const BoundaryData& bd, const SchemeParams& params) {
  const TetMesh& mesh = s.rho.mesh();
  const QVecField vh = element_mean(s.v(bd));
  double sum = 0.0;
  for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
    const double r = s.rho[k];
    sum += mesh.volume(static_cast<int>(k)) * (0.5 * r * vh[k].squaredNorm() + std::abs(H_h(params.law, params.reg, r)) +
                                               p_h(params.law, params.reg, r));
  }
  return sum;
}

RenormalizedTerms renormalized_continuity_residual(const QField& rho, const QField& rho_prev, const CRVecField& u,
                                                   const BoundaryData& bd, const SchemeParams& params,
                                                   const std::function<double(double)>& B,
                                                   const std::function<double(double)>& dB) {
  const TetMesh& mesh = rho.mesh();
  const double dt = params.dt, diff = params.reg.diffusion_coefficient();
  const FaceVelocity un(u);
  const std::size_t ne = mesh.num_elements();
  RenormalizedTerms out;
  out.residual.assign(ne, 0.0);
  out.time_entropy.assign(ne, 0.0);
  out.face_entropy.assign(ne, 0.0);
  out.inflow_entropy.assign(ne, 0.0);
  const auto EB = [&](double a, double b) { return rel_entropy_B(B, dB, a, b); };

  for (std::size_t kk = 0; kk < ne; ++kk) {
    const int k = static_cast<int>(kk);
    const double vol = mesh.volume(k), rk = rho[kk];
    double lhs = vol * (B(rk) - B(rho_prev[kk])) / dt;
    double rhs = 0.0;
    out.time_entropy[kk] = vol * EB(rho_prev[kk], rk) / dt;
    lhs += out.time_entropy[kk];
    lhs -= (B(rk) - rk * dB(rk)) * vol * div_h(u, k);
    out.scale = std::max({out.scale, std::abs(vol * B(rk) / dt), std::abs(vol * B(rho_prev[kk]) / dt)});
    for (int i = 0; i < 4; ++i) {
      const int f = mesh.element_faces(k)[static_cast<std::size_t>(i)];
      const Face& face = mesh.face(f);
      const double a = un.outward(mesh, k, i);
      if (face.is_boundary()) {
        if (bd.cls.is_inflow(f)) {
          const double ent = face.area * std::abs(a) * EB(bd.rho_b[kk], rk);
          out.inflow_entropy[kk] += ent;
          lhs += ent;
          rhs += face.area * std::abs(a) * B(bd.rho_b[kk]);
        } else {
          lhs += face.area * B(rk) * a;
        }
        continue;
      }
      const int l = mesh.across(k, i);
      const bool k_up = (k == face.owner) == (un[static_cast<std::size_t>(f)] >= 0.0);
      const double rup = k_up ? rk : rho.at(l);
      lhs += face.area * B(rup) * a;
      if (!k_up) {
        const double ent = face.area * std::abs(a) * EB(rup, rk);
        out.face_entropy[kk] += ent;
        lhs += ent;
      }
      // kappa h^omega [[rho]] [[1_K B'(rho)]]
      lhs += diff * face.area * (rk - rho.at(l)) * dB(rk);
    }
    out.residual[kk] = lhs - rhs;
  }
  return out;
}

std::vector<ScalarTest> continuity_test_catalog() {
  using std::numbers::pi;
  std::vector<ScalarTest> c;
  c.push_back({"affine", [](const Vec3& x) { return 1.0 + x[0] + 2.0 * x[1] - x[2]; },
               [](const Vec3&) { return Vec3(1.0, 2.0, -1.0); }});
  c.push_back({"trig",
               [](const Vec3& x) { return std::sin(pi * x[0]) * std::cos(pi * x[1]) * std::exp(0.5 * x[2]); },
               [](const Vec3& x) {
                 const double s = std::sin(pi * x[0]), co = std::cos(pi * x[1]), e = std::exp(0.5 * x[2]);
                 return Vec3(pi * std::cos(pi * x[0]) * co * e, -pi * s * std::sin(pi * x[1]) * e, 0.5 * s * co * e);
               }});
  c.push_back({"poly", [](const Vec3& x) { return x[0] * x[0] * x[1] + x[2] * x[2] * x[2]; },
               [](const Vec3& x) { return Vec3(2.0 * x[0] * x[1], x[0] * x[0], 3.0 * x[2] * x[2]); }});
  return c;
}

std::vector<VectorTest> momentum_test_catalog(const Box& box) {
  using std::numbers::pi;
  const Vec3 lo = box.lo, len = box.hi - box.lo;
  // bubble b(x) = prod sin(pi (x_i - lo_i) / len_i) vanishes on the box boundary.
  const auto bubble = [lo, len](const Vec3& x) {
    Vec3 s, c;
    for (int i = 0; i < 3; ++i) {
      const double a = pi * (x[i] - lo[i]) / len[i];
      s[i] = std::sin(a);
      c[i] = std::cos(a) * pi / len[i];
    }
    const double b = s[0] * s[1] * s[2];
    const Vec3 g(c[0] * s[1] * s[2], s[0] * c[1] * s[2], s[0] * s[1] * c[2]);
    return std::pair<double, Vec3>(b, g);
  };
  std::vector<VectorTest> c;
  const Vec3 dir(1.0, 0.5, -0.25);
  c.push_back({"bubble",
               [bubble, dir](const Vec3& x) { return Vec3(bubble(x).first * dir); },
               [bubble, dir](const Vec3& x) { return Mat3(dir * bubble(x).second.transpose()); }});
  // b(x) * (y, z, x): rotating field inside the bubble.
  c.push_back({"swirl",
               [bubble](const Vec3& x) { return Vec3(bubble(x).first * Vec3(x[1], x[2], x[0])); },
               [bubble](const Vec3& x) {
                 const auto [b, g] = bubble(x);
                 const Vec3 w(x[1], x[2], x[0]);
                 Mat3 dw;
                 dw << 0, 1, 0, 0, 0, 1, 1, 0, 0;
                 return Mat3(w * g.transpose() + b * dw);
               }});
  return c;
}

double consistency_residual_continuity(const State& prev, const State& next, const BoundaryData& bd,
                                       const SchemeParams& params, const ScalarTest& phi, int degree) {
  const TetMesh& mesh = next.rho.mesh();
  const QVecField vh = element_mean(next.v(bd));
  double r = 0.0;
  for (std::size_t kk = 0; kk < mesh.num_elements(); ++kk) {
    const int k = static_cast<int>(kk);
    const Vec3 uh = vh[kk] + bd.mean_u_b[kk];
    const double int_phi = integrate_element(mesh, k, phi.phi, degree);
    const Vec3 int_grad = integrate_element(mesh, k, phi.grad, degree);
    r += (next.rho[kk] - prev.rho[kk]) / params.dt * int_phi - next.rho[kk] * uh.dot(int_grad);
  }
  // Boundary fluxes with the affine boundary velocity trace.
  for (int f : mesh.boundary_faces()) {
    const Face& face = mesh.face(f);
    const int k = face.owner;
    const double rho = bd.cls.is_inflow(f) ? bd.rho_b.at(k) : next.rho.at(k);
    r += rho * integrate_face(mesh, f, [&](const Vec3& x) { return evaluate(bd.u_b, k, x).dot(face.normal) * phi.phi(x); },
                              degree);
  }
  return r;
}

double consistency_residual_momentum(const State& prev, const State& next, const BoundaryData& bd,
                                     const SchemeParams& params, const VectorTest& phi, const VectorFunction* f,
                                     int degree) {
  const TetMesh& mesh = next.rho.mesh();
  const QVecField vh = element_mean(next.v(bd));
  const QVecField vh_prev = element_mean(prev.v(bd));
  const double mu = params.mu, ml = params.mu + params.lambda;
  double r = 0.0;
  for (std::size_t kk = 0; kk < mesh.num_elements(); ++kk) {
    const int k = static_cast<int>(kk);
    const double rho = next.rho[kk];
    const Vec3& v = vh[kk];
    const Vec3& ub_hat = bd.mean_u_b[kk];
    const Vec3 uh = v + ub_hat;
    const Mat3& gb = bd.grad_u_b[kk];
    const Mat3 gu = grad_h(next.u, k);
    const Vec3 dt_m = (rho * v - prev.rho[kk] * vh_prev[kk]) / params.dt;
    const double ph = p_h(params.law, params.reg, rho);
    r += integrate_element(
        mesh, k,
        [&](const Vec3& x) {
          const Vec3 p = phi.phi(x);
          const Mat3 J = phi.jacobian(x);
          const Vec3 ub = evaluate(bd.u_b, k, x);
          double s = dt_m.dot(p);
          s -= rho * v.dot(J * uh);
          s -= rho * ub_hat.dot(J * uh);
          s += rho * (p.dot(gb * uh) + ub.dot(J * uh));
          s += mu * (gu.array() * J.array()).sum() + ml * gu.trace() * J.trace();
          s -= ph * J.trace();
          if (f != nullptr) s -= (*f)(x).dot(p);
          return s;
        },
        degree);
  }
  return r;
}

ErrorRow error_vs_reference(const State& s, const BoundaryData& bd, const SchemeParams& params,
                            const ReferenceSolution& ref, int degree) {
  const TetMesh& mesh = s.rho.mesh();
  const double t = s.t;
  ErrorRow row;
  row.k = s.k;
  row.t = t;
  const QVecField vh = element_mean(s.v(bd));
  const RelativeEnergy re = relative_energy(
      s.rho, vh, [&](const Vec3& x) { return ref.r(t, x); }, [&](const Vec3& x) { return ref.V(t, x); }, params.law,
      params.reg, degree);
  row.rel_energy = re.value;
  row.rel_energy_h = re.value_h;
  const CRVecField U = project_V(mesh, [&](const Vec3& x) { return Vec3(ref.V(t, x) + ref.u_b(x)); }, degree);
  const CRVecField e = s.u - U;
  row.velocity_l2 = std::pow(lp_norm(e, 2.0, degree), 2);
  row.velocity_h1 = std::pow(v_seminorm(e, 2.0), 2);
  return row;
}

std::vector<ErrorRow> error_vs_reference(const Trajectory& traj, const BoundaryData& bd, const SchemeParams& params,
                                         const ReferenceSolution& ref, int degree) {
  std::vector<ErrorRow> rows;
  double l2 = 0.0, h1 = 0.0;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    ErrorRow r = error_vs_reference(traj.states[i], bd, params, ref, degree);
    if (i > 0) {
      l2 += params.dt * r.velocity_l2;
      h1 += params.dt * r.velocity_h1;
    }
    r.cumulative_l2 = l2;
    r.cumulative_h1 = h1;
    rows.push_back(r);
  }
  return rows;
}

TimeReconstruction::TimeReconstruction(const Trajectory& traj) : traj_(&traj) {
  if (traj.states.empty()) throw std::invalid_argument("time reconstruction of an empty trajectory");
}

std::pair<std::size_t, double> TimeReconstruction::locate(double t) const {
  const auto& s = traj_->states;
  if (s.size() == 1 || t <= s.front().t) return {0, 0.0};
  if (t >= s.back().t) return {s.size() - 2, 1.0};
  std::size_t i = 0;
  while (i + 1 < s.size() && s[i + 1].t < t) ++i;
  const double w = (t - s[i].t) / (s[i + 1].t - s[i].t);
  return {i, w};
}

CRVecField TimeReconstruction::velocity(double t) const {
  const auto& s = traj_->states;
  if (s.size() == 1) return s.front().u;
  const auto [i, w] = locate(t);
  return (1.0 - w) * s[i].u + w * s[i + 1].u;
}

QField TimeReconstruction::density(double t) const {
  const auto& s = traj_->states;
  if (s.size() == 1) return s.front().rho;
  const auto [i, w] = locate(t);
  QField r = s[i].rho;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = (1.0 - w) * s[i].rho[k] + w * s[i + 1].rho[k];
  return r;
}

CRVecField TimeReconstruction::velocity_rate(double t) const {
  const auto& s = traj_->states;
  if (s.size() == 1) return CRVecField(s.front().u.mesh());
  const auto [i, w] = locate(t);
  (void)w;
  return (1.0 / (s[i + 1].t - s[i].t)) * (s[i + 1].u - s[i].u);
}

EstimateMonitor estimate_monitor(const Trajectory& traj, const BoundaryData& bd, const SchemeParams& params) {
  EstimateMonitor m;
  const double gamma = params.law.is_isentropic() ? params.law.gamma() : 2.0;
  double g2 = 0.0;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const State& s = traj.states[i];
    const TetMesh& mesh = s.rho.mesh();
    m.rho_linf_lgamma = std::max(m.rho_linf_lgamma, lp_norm(s.rho, gamma));
    const QVecField vh = element_mean(s.v(bd));
    double mom = 0.0;
    for (std::size_t k = 0; k < mesh.num_elements(); ++k)
      mom += mesh.volume(static_cast<int>(k)) * s.rho[k] * (vh[k] + bd.mean_u_b[k]).squaredNorm();
    m.momentum_linf_l2 = std::max(m.momentum_linf_l2, std::sqrt(mom));
    if (i > 0) g2 += params.dt * std::pow(v_seminorm(s.v(bd), 2.0), 2);
  }
  m.grad_v_l2l2 = std::sqrt(g2);
  return m;
}

double eoc(const std::vector<double>& values, const std::vector<double>& hs) {
  if (values.size() != hs.size() || values.size() < 2) throw std::invalid_argument("eoc needs at least two levels");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !(hs[i] > 0.0)) throw std::invalid_argument("eoc needs positive values and mesh sizes");
    const double x = std::log(hs[i]), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("eoc needs distinct mesh sizes");
  return (n * sxy - sx * sy) / den;
}

}  // namespace crfv
