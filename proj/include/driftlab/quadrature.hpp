#pragma once

#include <array>
#include <vector>

namespace driftlab {

/// Gauss-Legendre nodes and weights on [a, b].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int order, double a = -1.0, double b = 1.0);

/// Simplex rule in barycentric coordinates. Weights sum to 1, so a cell
/// integral is volume * sum(w_q * f(x_q)).
struct SimplexRule {
  std::vector<std::array<double, 4>> bary;
  std::vector<double> weights;
  int degree = 0;
};

/// Symmetric rule exact for quadratics (3 points on triangles, 4 on tets).
const SimplexRule& degree2_rule(int dim);

/// Collapsed (Duffy) product Gauss rule with `points_per_axis`^dim interior
/// points, all strictly inside the simplex.
SimplexRule collapsed_rule(int dim, int points_per_axis);

/// Cached collapsed rule with 4 points per axis (16 / 64 points).
const SimplexRule& high_order_rule(int dim);

}  // namespace driftlab
