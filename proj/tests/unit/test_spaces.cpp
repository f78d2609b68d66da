#include "doctest.h"

#include "../oracle.hpp"

#include "crfv/diagnostics.hpp"
#include "crfv/quadrature.hpp"
#include "crfv/spaces.hpp"

#include <numbers>

using namespace crfv;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("tet rules integrate monomials exactly") {
    for (int d = 1; d <= 8; ++d) {
      const TetRule& r = tet_rule(d);
      CHECK(r.degree >= d);
      for (int a = 0; a <= d; ++a)
        for (int b = 0; a + b <= d; ++b)
          for (int c = 0; a + b + c <= d; ++c) {
            double s = 0.0;
            for (std::size_t q = 0; q < r.weights.size(); ++q)
              s += r.weights[q] * std::pow(r.points[q][1], a) * std::pow(r.points[q][2], b) * std::pow(r.points[q][3], c);
            const double exact = factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
            CHECK(s / 6.0 == doctest::Approx(exact).epsilon(1e-13));
          }
    }
  }

  TEST_CASE("triangle rules integrate monomials exactly") {
    for (int d = 1; d <= 8; ++d) {
      const TriRule& r = tri_rule(d);
      for (int a = 0; a <= d; ++a)
        for (int b = 0; a + b <= d; ++b) {
          double s = 0.0;
          for (std::size_t q = 0; q < r.weights.size(); ++q)
            s += r.weights[q] * std::pow(r.points[q][1], a) * std::pow(r.points[q][2], b);
          CHECK(s / 2.0 == doctest::Approx(factorial(a) * factorial(b) / factorial(a + b + 2)).epsilon(1e-13));
        }
    }
  }
}

TEST_SUITE("spaces") {
  TEST_CASE("CR interpolation reproduces affine fields") {
    std::mt19937_64 rng(3);
    const TetMesh m = oracle::random_mesh(rng, 100);
    const Vec3 b(0.3, -1.2, 2.0);
    const Mat3 A = (Mat3() << 1, 2, 3, -1, 0.5, 0, 0.25, -2, 1).finished();
    const CRVecField u = project_V(m, VectorFunction([&](const Vec3& x) { return Vec3(b + A * x); }));
    for (std::size_t kk = 0; kk < m.num_elements(); ++kk) {
      const int k = static_cast<int>(kk);
      CHECK((grad_h(u, k) - A).norm() < 1e-12);
      CHECK(div_h(u, k) == doctest::Approx(A.trace()).epsilon(1e-12));
      const Vec3 x = m.barycenter(k) + 0.1 * (m.vertices()[static_cast<std::size_t>(m.tets()[kk][0])] - m.barycenter(k));
      CHECK((evaluate(u, k, x) - (b + A * x)).norm() < 1e-12);
    }
    const QVecField mean = element_mean(u);
    for (std::size_t k = 0; k < m.num_elements(); ++k)
      CHECK((mean[k] - (b + A * m.barycenter(static_cast<int>(k)))).norm() < 1e-12);
  }

  TEST_CASE("basis gradient matches the oracle CR basis") {
    const TetMesh m = oracle::two_tets();
    const auto G = oracle::build(m);
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 4; ++i)
        CHECK((basis_gradient(m, k, i) - oracle::cr_basis_grad(G.tets[static_cast<std::size_t>(k)], i)).norm() < 1e-12);
  }

  TEST_CASE("jumps and averages") {
    const TetMesh m = structured_box_mesh(1, 1, 1);
    QField g(m);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = static_cast<double>(k);
    for (int f : m.interior_faces()) {
      const auto ja = jump_avg(g, f);
      const Face& face = m.face(f);
      CHECK(ja.jump == doctest::Approx(g.at(face.neighbor) - g.at(face.owner)));
      CHECK(jump_avg(g, f, true).jump == doctest::Approx(-ja.jump));
      CHECK(ja.average == doctest::Approx(0.5 * (g.at(face.neighbor) + g.at(face.owner))));
    }
    CHECK_THROWS_AS(jump_avg(g, m.boundary_faces()[0]), std::invalid_argument);
    CHECK(q_seminorm(QField(m, 2.0), 2.0) == 0.0);
  }

  TEST_CASE("projection rates") {
    using std::numbers::pi;
    const ScalarFunction f = [](const Vec3& x) { return std::sin(pi * x[0]) * std::cos(x[1]) + x[2] * x[2]; };
    std::vector<double> hs, eq, ev, eg;
    for (int n : {2, 4, 8}) {
      const TetMesh m = structured_box_mesh(n, n, n);
      const QField q = project_Q(m, f, 4);
      const CRField v = project_V(m, f, 4);
      double l2q = 0.0, l2v = 0.0;
      for (std::size_t kk = 0; kk < m.num_elements(); ++kk) {
        const int k = static_cast<int>(kk);
        l2q += integrate_element(m, k, [&](const Vec3& x) { return std::pow(f(x) - q[kk], 2); }, 4);
        l2v += integrate_element(m, k, [&](const Vec3& x) { return std::pow(f(x) - evaluate(v, k, x), 2); }, 4);
      }
      hs.push_back(m.h());
      eq.push_back(std::sqrt(l2q));
      ev.push_back(std::sqrt(l2v));
    }
    CHECK(eoc(eq, hs) == doctest::Approx(1.0).epsilon(0.15));
    CHECK(eoc(ev, hs) == doctest::Approx(2.0).epsilon(0.15));
  }

  TEST_CASE("norms of simple fields") {
    const TetMesh m = structured_box_mesh(2, 2, 2);
    CHECK(lp_norm(QField(m, 3.0), 2.0) == doctest::Approx(3.0));
    const CRField v = project_V(m, ScalarFunction([](const Vec3& x) { return 2.0 * x[0]; }));
    CHECK(v_seminorm(v, 2.0) == doctest::Approx(2.0));
    CHECK(lp_norm(v, 1.0) == doctest::Approx(1.0));
  }
}
