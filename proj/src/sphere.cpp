#include "driftlab/sphere.hpp"

#include <cmath>
#include <numbers>

#include "driftlab/error.hpp"
#include "driftlab/quadrature.hpp"

namespace driftlab {

namespace {

// Forward-mode dual number carrying a value and its three partials.
struct Dual {
  double v = 0.0;
  std::array<double, 3> d{};
};

Dual operator+(const Dual& a, const Dual& b) {
  return {a.v + b.v, {a.d[0] + b.d[0], a.d[1] + b.d[1], a.d[2] + b.d[2]}};
}
Dual operator-(const Dual& a, const Dual& b) {
  return {a.v - b.v, {a.d[0] - b.d[0], a.d[1] - b.d[1], a.d[2] - b.d[2]}};
}
Dual operator*(const Dual& a, const Dual& b) {
  Dual r{a.v * b.v, {}};
  for (int i = 0; i < 3; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
Dual operator*(double s, const Dual& a) { return {s * a.v, {s * a.d[0], s * a.d[1], s * a.d[2]}}; }
Dual operator/(const Dual& a, const Dual& b) {
  Dual r{a.v / b.v, {}};
  for (int i = 0; i < 3; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) / (b.v * b.v);
  return r;
}
Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.v);
  return {s, {a.d[0] / (2 * s), a.d[1] / (2 * s), a.d[2] / (2 * s)}};
}
double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Coefficients (ascending powers) of d^m/dz^m P_l(z).
std::vector<double> legendre_derivative(int l, int m) {
  std::vector<double> p0{1.0}, p1{0.0, 1.0};
  std::vector<double> pl = l == 0 ? p0 : p1;
  for (int k = 2; k <= l; ++k) {
    std::vector<double> p2(k + 1, 0.0);
    for (std::size_t i = 0; i < p1.size(); ++i) p2[i + 1] += (2.0 * k - 1.0) * p1[i] / k;
    for (std::size_t i = 0; i < p0.size(); ++i) p2[i] -= (k - 1.0) * p0[i] / k;
    p0 = p1;
    p1 = p2;
    pl = p2;
  }
  for (int d = 0; d < m; ++d) {
    if (pl.size() <= 1) return {0.0};
    std::vector<double> q(pl.size() - 1);
    for (std::size_t i = 1; i < pl.size(); ++i) q[i - 1] = pl[i] * static_cast<double>(i);
    pl = q;
  }
  return pl;
}

const std::vector<double>& legendre_table(int l, int m) {
  static const auto table = [] {
    std::vector<std::vector<double>> t(81);
    for (int ll = 0; ll <= 8; ++ll)
      for (int mm = 0; mm <= ll; ++mm) t[ll * 9 + mm] = legendre_derivative(ll, mm);
    return t;
  }();
  return table[l * 9 + m];
}

template <class T>
T harmonic(int l, int m, const T& x, const T& y, const T& z) {
  const int am = std::abs(m);
  const auto& coeff = legendre_table(l, am);
  T q = 0.0 * x;
  q.v = 0.0;
  for (std::size_t i = coeff.size(); i-- > 0;) {
    q = q * z;
    q.v += coeff[i];
  }
  // (x + i y)^|m|
  T re = 0.0 * x, im = 0.0 * x;
  re.v = 1.0;
  for (int k = 0; k < am; ++k) {
    const T nre = re * x - im * y;
    const T nim = re * y + im * x;
    re = nre;
    im = nim;
  }
  double norm_lm = std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi) * factorial(l - am) /
                             factorial(l + am));
  if (m == 0) return norm_lm * q;
  norm_lm *= std::sqrt(2.0);
  return norm_lm * (q * (m > 0 ? re : im));
}

Dual make_dual(double v, int axis) {
  Dual d{v, {}};
  d.d[axis] = 1.0;
  return d;
}

template <class T>
void normalize(T& x, T& y, T& z) {
  const T r = sqrt(x * x + y * y + z * z);
  x = x / r;
  y = y / r;
  z = z / r;
}

}  // namespace

SphereRule sphere_quadrature(int order) {
  require(order >= 1, "sphere quadrature order must be >= 1");
  const auto gl = gauss_legendre(order);
  const int nphi = 2 * order;
  SphereRule rule;
  for (int i = 0; i < order; ++i) {
    const double z = gl.nodes[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int j = 0; j < nphi; ++j) {
      const double phi = 2.0 * std::numbers::pi * (j + 0.5) / nphi;
      rule.points.push_back({s * std::cos(phi), s * std::sin(phi), z});
      rule.weights.push_back(gl.weights[i] * 2.0 * std::numbers::pi / nphi);
    }
  }
  return rule;
}

double real_harmonic(int l, int m, const Point& x) {
  require(l >= 0 && l <= 8 && std::abs(m) <= l, "harmonic degree/order out of range");
  const double r = norm(x);
  require(r > 0.0, "harmonic evaluated at the origin");
  Dual dx{x[0] / r, {}}, dy{x[1] / r, {}}, dz{x[2] / r, {}};
  return harmonic(l, m, dx, dy, dz).v;
}

HarmonicExpansion::HarmonicExpansion(std::vector<HarmonicTerm> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_)
    require(t.l >= 0 && t.l <= 8 && std::abs(t.m) <= t.l, "harmonic degree/order out of range");
}

double HarmonicExpansion::operator()(const Point& x) const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.coefficient * real_harmonic(t.l, t.m, x);
  return s;
}

Point HarmonicExpansion::gradient(const Point& x) const {
  Dual dx = make_dual(x[0], 0), dy = make_dual(x[1], 1), dz = make_dual(x[2], 2);
  normalize(dx, dy, dz);
  Point g{};
  for (const auto& t : terms_) {
    const Dual h = harmonic(t.l, t.m, dx, dy, dz);
    for (int i = 0; i < 3; ++i) g[i] += t.coefficient * h.d[i];
  }
  return g;
}

HarmonicExpansion HarmonicExpansion::inverse_laplace_beltrami() const {
  std::vector<HarmonicTerm> out;
  for (const auto& t : terms_) {
    if (t.l == 0) {
      require(std::abs(t.coefficient) < 1e-14, "Laplace-Beltrami inverse needs a mean-zero input");
      continue;
    }
    out.push_back({t.l, t.m, -t.coefficient / (t.l * (t.l + 1.0))});
  }
  return HarmonicExpansion(std::move(out));
}

HarmonicExpansion HarmonicExpansion::scaled(double s) const {
  auto t = terms_;
  for (auto& term : t) term.coefficient *= s;
  return HarmonicExpansion(std::move(t));
}

double HarmonicExpansion::sphere_integral(const std::vector<const HarmonicExpansion*>& factors,
                                          const SphereRule& rule) {
  double s = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    double p = 1.0;
    for (const auto* f : factors) p *= (*f)(rule.points[q]);
    s += rule.weights[q] * p;
  }
  return s;
}

}  // namespace driftlab
