#include "driftlab/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "driftlab/error.hpp"

namespace driftlab {

GaussLegendre gauss_legendre(int order, double a, double b) {
  require(order >= 1, "Gauss-Legendre order must be >= 1");
  GaussLegendre rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
  }
  const double mid = 0.5 * (a + b);
  const double half_len = 0.5 * (b - a);
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = mid + half_len * rule.nodes[i];
    rule.weights[i] *= half_len;
  }
  return rule;
}

const SimplexRule& degree2_rule(int dim) {
  static const SimplexRule tri = [] {
    SimplexRule r;
    const double a = 1.0 / 6.0;
    const double b = 2.0 / 3.0;
    r.bary = {{b, a, a, 0}, {a, b, a, 0}, {a, a, b, 0}};
    r.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    r.degree = 2;
    return r;
  }();
  static const SimplexRule tet = [] {
    SimplexRule r;
    const double a = 0.5854101966249685;
    const double b = 0.1381966011250105;
    r.bary = {{a, b, b, b}, {b, a, b, b}, {b, b, a, b}, {b, b, b, a}};
    r.weights = {0.25, 0.25, 0.25, 0.25};
    r.degree = 2;
    return r;
  }();
  require(dim == 2 || dim == 3, "simplex rules exist for dimensions 2 and 3");
  return dim == 2 ? tri : tet;
}

SimplexRule collapsed_rule(int dim, int points_per_axis) {
  require(dim == 2 || dim == 3, "simplex rules exist for dimensions 2 and 3");
  const auto gl = gauss_legendre(points_per_axis, 0.0, 1.0);
  SimplexRule r;
  r.degree = 2 * points_per_axis - 1;
  const int q = points_per_axis;
  if (dim == 2) {
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) {
        const double u = gl.nodes[i];
        const double v = gl.nodes[j];
        const double l1 = u;
        const double l2 = v * (1.0 - u);
        r.bary.push_back({1.0 - l1 - l2, l1, l2, 0.0});
        r.weights.push_back(2.0 * gl.weights[i] * gl.weights[j] * (1.0 - u));
      }
  } else {
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j)
        for (int k = 0; k < q; ++k) {
          const double u = gl.nodes[i];
          const double v = gl.nodes[j];
          const double w = gl.nodes[k];
          const double l1 = u;
          const double l2 = v * (1.0 - u);
          const double l3 = w * (1.0 - u) * (1.0 - v);
          r.bary.push_back({1.0 - l1 - l2 - l3, l1, l2, l3});
          r.weights.push_back(6.0 * gl.weights[i] * gl.weights[j] * gl.weights[k] *
                              (1.0 - u) * (1.0 - u) * (1.0 - v));
        }
  }
  return r;
}

const SimplexRule& high_order_rule(int dim) {
  static const SimplexRule tri = collapsed_rule(2, 4);
  static const SimplexRule tet = collapsed_rule(3, 4);
  require(dim == 2 || dim == 3, "simplex rules exist for dimensions 2 and 3");
  return dim == 2 ? tri : tet;
}

}  // namespace driftlab
