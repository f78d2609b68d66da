#include "crfv/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace crfv {

namespace {

// Gauss-Legendre nodes and weights mapped to [0, 1].
template <unsigned N>
std::pair<std::vector<double>, std::vector<double>> gauss01_impl() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  std::vector<double> x, wt;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      x.push_back(0.5);
      wt.push_back(0.5 * w[i]);
    } else {
      x.push_back(0.5 * (1.0 - a[i]));
      wt.push_back(0.5 * w[i]);
      x.push_back(0.5 * (1.0 + a[i]));
      wt.push_back(0.5 * w[i]);
    }
  }
  return {x, wt};
}

std::pair<std::vector<double>, std::vector<double>> gauss01(int n) {
  switch (n) {
    case 1: return {{0.5}, {1.0}};
    case 2: return gauss01_impl<2>();
    case 3: return gauss01_impl<3>();
    case 4: return gauss01_impl<4>();
    case 5: return gauss01_impl<5>();
    case 6: return gauss01_impl<6>();
    case 7: return gauss01_impl<7>();
    case 8: return gauss01_impl<8>();
    case 9: return gauss01_impl<9>();
    case 10: return gauss01_impl<10>();
    default: throw std::invalid_argument("quadrature degree too high");
  }
}

TetRule make_tet_rule(int degree) {
  TetRule r;
  r.degree = degree;
  if (degree <= 1) {
    r.points = {{0.25, 0.25, 0.25, 0.25}};
    r.weights = {1.0};
    r.degree = 1;
    return r;
  }
  if (degree == 2) {
    constexpr double a = 0.5854101966249685;
    constexpr double b = 0.1381966011250105;
    r.points = {{a, b, b, b}, {b, a, b, b}, {b, b, a, b}, {b, b, b, a}};
    r.weights = {0.25, 0.25, 0.25, 0.25};
    return r;
  }
  // Collapsed coordinates x = s, y = t(1-s), z = u(1-s)(1-t), Jacobian (1-s)^2 (1-t).
  const int n = (degree + 4) / 2;
  const auto [x, w] = gauss01(n);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double s = x[i], t = x[j], u = x[k];
        const double px = s, py = t * (1 - s), pz = u * (1 - s) * (1 - t);
        r.points.push_back({1 - px - py - pz, px, py, pz});
        r.weights.push_back(6.0 * w[i] * w[j] * w[k] * (1 - s) * (1 - s) * (1 - t));
      }
  return r;
}

TriRule make_tri_rule(int degree) {
  TriRule r;
  r.degree = degree;
  if (degree <= 1) {
    r.points = {{1.0 / 3, 1.0 / 3, 1.0 / 3}};
    r.weights = {1.0};
    r.degree = 1;
    return r;
  }
  if (degree == 2) {
    r.points = {{2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 2.0 / 3}};
    r.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    return r;
  }
  const int n = (degree + 3) / 2;
  const auto [x, w] = gauss01(n);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double s = x[i], t = x[j];
      const double px = s, py = t * (1 - s);
      r.points.push_back({1 - px - py, px, py});
      r.weights.push_back(2.0 * w[i] * w[j] * (1 - s));
    }
  return r;
}

template <class Rule, class Make>
const Rule& cached(std::map<int, Rule>& cache, std::mutex& mtx, int degree, Make make) {
  std::lock_guard lock(mtx);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, make(degree)).first;
  return it->second;
}

}  // namespace

const TetRule& tet_rule(int degree) {
  static std::map<int, TetRule> cache;
  static std::mutex mtx;
  return cached(cache, mtx, degree, make_tet_rule);
}

const TriRule& tri_rule(int degree) {
  static std::map<int, TriRule> cache;
  static std::mutex mtx;
  return cached(cache, mtx, degree, make_tri_rule);
}

}  // namespace crfv
