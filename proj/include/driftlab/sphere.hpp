#pragma once

#include <vector>

#include "driftlab/mesh.hpp"

namespace driftlab {

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta) with
/// `order` nodes, equispaced in phi with 2*order nodes. Exact for
/// spherical polynomials of degree <= 2*order - 1.
struct SphereRule {
  std::vector<Point> points;
  std::vector<double> weights;
};
SphereRule sphere_quadrature(int order);

/// Real orthonormal spherical harmonic Y_lm at the direction of x
/// (x != 0). m > 0 selects the cosine, m < 0 the sine branch; no
/// Condon-Shortley phase. l <= 8.
double real_harmonic(int l, int m, const Point& x);

struct HarmonicTerm {
  int l = 0;
  int m = 0;
  double coefficient = 0.0;
};

/// Finite real spherical-harmonic expansion, evaluated as a 0-homogeneous
/// function on R^3 minus the origin.
class HarmonicExpansion {
public:
  HarmonicExpansion() = default;
  explicit HarmonicExpansion(std::vector<HarmonicTerm> terms);

  const std::vector<HarmonicTerm>& terms() const { return terms_; }
  double operator()(const Point& x) const;
  /// Euclidean gradient of x -> f(x/|x|).
  Point gradient(const Point& x) const;
  /// Solution psi of Delta_S psi = f; requires a vanishing l = 0 term.
  HarmonicExpansion inverse_laplace_beltrami() const;
  HarmonicExpansion scaled(double s) const;
  /// Integral over the unit sphere of the product of the given expansions.
  static double sphere_integral(const std::vector<const HarmonicExpansion*>& factors,
                                const SphereRule& rule);

private:
  std::vector<HarmonicTerm> terms_;
};

}  // namespace driftlab
