#include "doctest.h"

#include "crfv/diagnostics.hpp"

#include <boost/math/differentiation/finite_difference.hpp>

using namespace crfv;
using boost::math::differentiation::finite_difference_derivative;

namespace {

struct Run {
  TetMesh mesh = structured_box_mesh(3, 3, 3);
  std::unique_ptr<Scheme> scheme;
  Trajectory traj;

  explicit Run(const Vec3& ub, int steps = 3) {
    SchemeParams p;
    p.dt = 0.05;
    p.mu = 0.5;
    p.law = PressureLaw::isentropic(1.0, 1.6);
    p.reg.h = mesh.h();
    p.reg.kappa = 1;
    p.reg.kappa_tilde = 1;
    p.reg.eta = 0.4;
    scheme = std::make_unique<Scheme>(mesh, BoundaryData::make(mesh, [](const Vec3& x) { return 1.0 + 0.5 * x[2]; },
                                                               [=](const Vec3& x) { return Vec3(ub * (1.0 + 0.2 * x[1])); }),
                                      p);
    const State s0 = scheme->initial_state([](const Vec3& x) { return 1.0 + 0.4 * std::sin(4.0 * x[0]); },
                                           [](const Vec3& x) { return Vec3(std::sin(3.0 * x[2]), 0.3, -x[0]); });
    traj = run(*scheme, s0, steps);
  }
};

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("mass balance") {
    Run r(Vec3(0.6, 0.0, 0.1));
    REQUIRE_FALSE(r.traj.failed);
    const auto rows = mass_balance_residual(r.traj, r.scheme->boundary(), r.scheme->params().dt);
    CHECK(rows.size() == r.traj.states.size());
    for (const auto& row : rows) {
      CHECK(row.residual <= 1e-11 * rows.front().step.mass);
      CHECK(row.step.outflow >= 0.0);
      CHECK(row.step.inflow >= 0.0);
    }
    CHECK(rows.back().cumulative_inflow > 0.0);
  }

  TEST_CASE("energy identity and inequality") {
    Run r(Vec3(0.6, 0.0, 0.1));
    REQUIRE_FALSE(r.traj.failed);
    const double scale = energy_scale(r.traj.states.front(), r.scheme->boundary(), r.scheme->params());
    for (std::size_t k = 1; k < r.traj.states.size(); ++k) {
      const auto e = energy_step(r.traj.states[k - 1], r.traj.states[k], r.scheme->boundary(), r.scheme->params());
      CHECK(std::abs(e.identity_residual) <= 1e-8 * scale);
      CHECK(e.slack >= -1e-8 * scale);
      CHECK(e.min_dissipation() >= -1e-12 * scale);
    }
  }

  TEST_CASE("energy decays without boundary data") {
    Run r(Vec3::Zero(), 4);
    REQUIRE_FALSE(r.traj.failed);
    for (std::size_t k = 1; k < r.traj.states.size(); ++k) {
      const auto e = energy_step(r.traj.states[k - 1], r.traj.states[k], r.scheme->boundary(), r.scheme->params());
      CHECK(e.energy <= e.energy_prev + 1e-12);
    }
  }

  TEST_CASE("renormalized continuity with B = rho matches the continuity rows") {
    Run r(Vec3(0.6, 0.0, 0.1), 1);
    const auto& s0 = r.traj.states[0];
    const auto& s1 = r.traj.states[1];
    const auto t = renormalized_continuity_residual(
        s1.rho, s0.rho, s1.u, r.scheme->boundary(), r.scheme->params(), [](double x) { return x; },
        [](double) { return 1.0; });
    for (std::size_t k = 0; k < t.residual.size(); ++k) {
      CHECK(std::abs(t.residual[k]) <= 1e-9 * t.scale);
      CHECK(std::abs(t.time_entropy[k]) < 1e-14);
    }
  }

  TEST_CASE("test catalogs: gradients and boundary values") {
    for (const auto& c : continuity_test_catalog())
      for (const Vec3& x : {Vec3(0.1, 0.2, 0.3), Vec3(0.7, 0.4, 0.9)})
        for (int d = 0; d < 3; ++d) {
          const auto g = [&](double s) {
            Vec3 y = x;
            y[d] = s;
            return c.phi(y);
          };
          CHECK(finite_difference_derivative(g, x[d]) == doctest::Approx(c.grad(x)[d]).epsilon(1e-8));
        }
    const Box box{Vec3(-1, 0, 0), Vec3(1, 2, 0.5)};
    for (const auto& c : momentum_test_catalog(box)) {
      CHECK(c.phi(Vec3(-1, 0.3, 0.2)).norm() < 1e-14);
      CHECK(c.phi(Vec3(0.2, 2.0, 0.2)).norm() < 1e-14);
      CHECK(c.phi(Vec3(0.2, 1.0, 0.5)).norm() < 1e-14);
      const Vec3 x(0.3, 0.7, 0.1);
      for (int d = 0; d < 3; ++d) {
        for (int i = 0; i < 3; ++i) {
          const auto g = [&](double s) {
            Vec3 y = x;
            y[d] = s;
            return c.phi(y)[i];
          };
          CHECK(finite_difference_derivative(g, x[d]) == doctest::Approx(c.jacobian(x)(i, d)).epsilon(1e-8));
        }
      }
    }
  }

  TEST_CASE("errors against an exactly represented reference vanish") {
    const TetMesh m = structured_box_mesh(2, 2, 2);
    SchemeParams p;
    p.reg.h = m.h();
    p.reg.kappa_tilde = 1;
    const Vec3 a(0.2, -0.4, 0.1);
    const BoundaryData bd = BoundaryData::make(m, [](const Vec3&) { return 1.0; }, [&](const Vec3&) { return a; });
    State s;
    s.rho = QField(m, 1.3);
    s.u = CRVecField(m, a);
    ReferenceSolution ref;
    ref.r = [](double, const Vec3&) { return 1.3; };
    ref.V = [](double, const Vec3&) { return Vec3(Vec3::Zero()); };
    ref.u_b = [&](const Vec3&) { return a; };
    const auto e = error_vs_reference(s, bd, p, ref);
    CHECK(std::abs(e.rel_energy) < 1e-14);
    CHECK(std::abs(e.rel_energy_h) < 1e-14);
    CHECK(e.velocity_l2 < 1e-28);
    CHECK(e.velocity_h1 < 1e-28);
    s.rho[0] = 1.5;
    CHECK(error_vs_reference(s, bd, p, ref).rel_energy_h > error_vs_reference(s, bd, p, ref).rel_energy);
  }

  TEST_CASE("time reconstruction") {
    Run r(Vec3(0.6, 0.0, 0.1), 2);
    const TimeReconstruction tr(r.traj);
    const double t = 0.5 * (r.traj.states[0].t + r.traj.states[1].t);
    const CRVecField mid = tr.velocity(t);
    for (std::size_t f = 0; f < mid.size(); ++f)
      CHECK((mid[f] - 0.5 * (r.traj.states[0].u[f] + r.traj.states[1].u[f])).norm() < 1e-14);
    const CRVecField rate = tr.velocity_rate(t);
    const double dt = r.scheme->params().dt;
    for (std::size_t f = 0; f < mid.size(); ++f)
      CHECK((rate[f] - (r.traj.states[1].u[f] - r.traj.states[0].u[f]) / dt).norm() < 1e-10);
    CHECK(tr.density(-1.0)[0] == r.traj.states[0].rho[0]);
  }

  TEST_CASE("eoc") {
    const std::vector<double> hs{0.4, 0.2, 0.1}, v{0.16, 0.04, 0.01};
    CHECK(eoc(v, hs) == doctest::Approx(2.0));
    CHECK_THROWS_AS(eoc({1.0}, {0.1}), std::invalid_argument);
    CHECK_THROWS_AS(eoc({1.0, 0.0}, {0.2, 0.1}), std::invalid_argument);
  }
}
