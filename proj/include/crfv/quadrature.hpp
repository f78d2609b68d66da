#pragma once

#include <array>
#include <vector>

namespace crfv {

/// Quadrature rule on a simplex in barycentric coordinates. Weights sum to one, so the
/// integral over a cell is measure * sum_q w_q f(x_q).
template <std::size_t N>
struct SimplexRule {
  std::vector<std::array<double, N>> points;
  std::vector<double> weights;
  int degree = 0;
};

using TetRule = SimplexRule<4>;
using TriRule = SimplexRule<3>;

/// Rule on the tetrahedron exact for polynomials of total degree <= `degree`.
/// Degrees 1 and 2 use the 1- and 4-point rules; higher degrees use a collapsed
/// Gauss-Legendre product rule.
const TetRule& tet_rule(int degree);
const TriRule& tri_rule(int degree);

}  // namespace crfv
