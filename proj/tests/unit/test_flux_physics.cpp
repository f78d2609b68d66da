#include "doctest.h"

#include "../oracle.hpp"

#include "crfv/flux.hpp"
#include "crfv/physics.hpp"

#include <cmath>

using namespace crfv;

TEST_SUITE("flux") {
  TEST_CASE("Up operator") {
    CHECK(up_operator(2.0, 5.0, 3.0) == 6.0);
    CHECK(up_operator(2.0, 5.0, -3.0) == -15.0);
    CHECK(up_operator(2.0, 5.0, 0.0) == 0.0);
  }

  TEST_CASE("upwind choice and tie rule") {
    const TetMesh m = oracle::two_tets();
    const int f = m.interior_faces()[0];
    const Face& face = m.face(f);
    const QField g(m, std::vector<double>{1.0, 4.0});
    CRVecField u(m);
    u[static_cast<std::size_t>(f)] = face.normal;
    CHECK(upwind_value(g, u, f) == g.at(face.owner));
    CHECK(upwind_element(m, FaceVelocity(u), f) == face.owner);
    u[static_cast<std::size_t>(f)] = -face.normal;
    CHECK(upwind_value(g, u, f) == g.at(face.neighbor));
    // u . n = 0 takes the owner value.
    u[static_cast<std::size_t>(f)] = Vec3::Zero();
    CHECK(upwind_value(g, u, f) == g.at(face.owner));
    CHECK(flux(g, u, f, face.owner) == 0.0);
  }

  TEST_CASE("flux argument checks and boundary entries") {
    const TetMesh m = structured_box_mesh(1, 1, 1);
    const QField g(m, 1.0);
    const CRVecField u(m, Vec3(1, 0, 0));
    const int f = m.interior_faces()[0];
    int stranger = 0;
    while (stranger == m.face(f).owner || stranger == m.face(f).neighbor) ++stranger;
    CHECK_THROWS_AS(flux(g, u, f, stranger), std::invalid_argument);
    CHECK_THROWS_AS(flux(g, u, m.boundary_faces()[0], 0), std::invalid_argument);
    const FaceFluxSet s = face_fluxes(g, u);
    for (int b : m.boundary_faces()) {
      CHECK(std::isnan(s.upwind[static_cast<std::size_t>(b)]));
      CHECK(s.up[static_cast<std::size_t>(b)] == 0.0);
    }
  }
}

TEST_SUITE("physics") {
  TEST_CASE("isentropic Helmholtz function") {
    for (double gamma : {1.4, 2.0, 3.0}) {
      const PressureLaw law = PressureLaw::isentropic(1.5, gamma);
      for (double rho : {0.1, 1.0, 3.7}) {
        CHECK(rho * law.dH(rho) - law.H(rho) == doctest::Approx(law.p(rho)).epsilon(1e-13));
        CHECK(law.d2H(rho) == doctest::Approx(law.dp(rho) / rho).epsilon(1e-13));
        CHECK(law.p(rho) == doctest::Approx(1.5 * std::pow(rho, gamma)));
      }
    }
  }

  TEST_CASE("general law by quadrature agrees with the closed form") {
    const PressureLaw iso = PressureLaw::isentropic(1.0, 2.0);
    const PressureLaw gen = PressureLaw::general([](double r) { return r * r; }, [](double r) { return 2.0 * r; }, 1.0, 1.0);
    for (double rho : {0.2, 1.0, 2.5}) {
      CHECK(gen.p(rho) == doctest::Approx(iso.p(rho)));
      // H is fixed up to a multiple of rho; compare the relative entropy instead.
      CHECK(rel_entropy(gen, rho, 1.3) == doctest::Approx(rel_entropy(iso, rho, 1.3)).epsilon(1e-10));
      CHECK(rho * gen.dH(rho) - gen.H(rho) == doctest::Approx(gen.p(rho)).epsilon(1e-10));
    }
  }

  TEST_CASE("relative entropy") {
    const PressureLaw law = PressureLaw::isentropic(1.0, 1.4);
    CHECK(rel_entropy(law, 1.2, 1.2) == doctest::Approx(0.0));
    for (double rho : {0.0, 0.3, 2.0, 10.0}) CHECK(rel_entropy(law, rho, 0.9) >= 0.0);
    CHECK_THROWS_AS(rel_entropy(law, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(rel_entropy(law, -1.0, 1.0), DomainError);
  }

  TEST_CASE("pressure regularization") {
    RegularizationParams reg;
    reg.kappa_tilde = 1;
    reg.eta = 0.5;
    reg.h = 0.25;
    const PressureLaw law = PressureLaw::isentropic(1.0, 2.0);
    CHECK(reg.pressure_coefficient() == doctest::Approx(0.5));
    CHECK(p_h(law, reg, 2.0) == doctest::Approx(4.0 + 0.5 * 4.0));
    CHECK(2.0 * dH_h(law, reg, 2.0) - H_h(law, reg, 2.0) == doctest::Approx(p_h(law, reg, 2.0)));
    CHECK(reg.range_warning().empty());
    reg.eta = 0.9;
    CHECK_FALSE(reg.range_warning().empty());
    reg.kappa = 1;
    reg.omega = 0.2;
    reg.eta = 0.5;
    CHECK_FALSE(reg.range_warning().empty());
  }

  TEST_CASE("structural constants make H - a p and a p - H convex") {
    const PressureLaw law = PressureLaw::isentropic(1.0, 1.5);
    const double a = law.a_under(), b = law.a_bar();
    CHECK(min_second_difference([&](double r) { return law.H(r) - a * law.p(r); }, 0.01, 5.0) >= -1e-8);
    CHECK(min_second_difference([&](double r) { return b * law.p(r) - law.H(r); }, 0.01, 5.0) >= -1e-8);
    CHECK(coercivity_constant(law, 0.5, 2.0) > 0.0);
  }
}
