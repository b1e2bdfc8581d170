#include "driftlab/analytic.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <random>

#include "driftlab/error.hpp"
#include "driftlab/parallel.hpp"
#include "driftlab/zhikov.hpp"

namespace driftlab {

namespace {

double parse_number(std::string_view text, const std::string& spec) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    fail_validation("malformed number '" + std::string(text) + "' in field spec '" + spec + "'");
  return v;
}

std::pair<std::string, std::string> split_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) return {spec, ""};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

double bump(double r) {
  if (r >= 0.5) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - 4.0 * r * r));
}

// d(bump)/dx_i = bump * (-8 / (1 - 4 r^2)^2) * x_i
double bump_factor(double r) {
  if (r >= 0.5) return 0.0;
  const double s = 1.0 - 4.0 * r * r;
  return bump(r) * (-8.0 / (s * s));
}

const SphericalPair& default_pair() {
  static const SphericalPair pair = build_pair();
  return pair;
}

}  // namespace

ScalarFn parse_scalar_spec(const std::string& spec, const Domain& domain) {
  const Point c = domain.center();
  const int dim = domain.dimension();
  auto radius = [c](const Point& x) { return norm(x - c); };
  const auto [head, arg] = split_spec(spec);
  if (head == "zero") return [](const Point&) { return 0.0; };
  if (head == "const") {
    const double v = parse_number(arg, spec);
    return [v](const Point&) { return v; };
  }
  if (head == "coord") {
    const double i = parse_number(arg, spec);
    if (i != std::floor(i) || i < 0 || i >= dim)
      fail_validation("coord index out of range in '" + spec + "'");
    const int axis = static_cast<int>(i);
    return [axis](const Point& x) { return x[axis]; };
  }
  if (head == "neg_log_r")
    return [radius](const Point& x) {
      const double r = radius(x);
      return r > 0.0 ? -std::log(r) : 0.0;
    };
  if (head == "log_r")
    return [radius](const Point& x) {
      const double r = radius(x);
      return r > 0.0 ? std::log(r) : 0.0;
    };
  if (head == "log_r_masked")
    return [radius, c](const Point& x) {
      const double r = radius(x);
      if (r == 0.0 || (x[0] - c[0]) * (x[1] - c[1]) <= 0.0) return 0.0;
      return std::log(r);
    };
  if (head == "r_pow") {
    const double q = parse_number(arg, spec);
    return [radius, q](const Point& x) {
      const double r = radius(x);
      if (r == 0.0) return q >= 0.0 ? (q == 0.0 ? 1.0 : 0.0) : 0.0;
      return std::pow(r, q);
    };
  }
  if (head == "paraboloid")
    return [radius](const Point& x) {
      const double r = radius(x);
      return 1.0 - r * r;
    };
  if (head == "sin_product" || head == "sin_pi_product") {
    double k = parse_number(arg, spec);
    if (head == "sin_pi_product") k *= std::numbers::pi;
    return [k, dim](const Point& x) {
      double p = 1.0;
      for (int d = 0; d < dim; ++d) p *= std::sin(k * x[d]);
      return p;
    };
  }
  if (head == "bump") return [radius](const Point& x) { return bump(radius(x)); };
  if (head == "indicator_ball") {
    const double R = parse_number(arg, spec);
    return [radius, R](const Point& x) { return radius(x) < R ? 1.0 : 0.0; };
  }
  fail_validation("unknown scalar field spec '" + spec + "'");
}

VectorFn parse_vector_spec(const std::string& spec, const Domain& domain) {
  const Point c = domain.center();
  const int dim = domain.dimension();
  const auto [head, arg] = split_spec(spec);
  if (head == "zero") return [](const Point&) { return Point{}; };
  if (head == "rotation") return [c](const Point& x) { return Point{-(x[1] - c[1]), x[0] - c[0], 0.0}; };
  if (head == "rotation_gauss")
    return [c](const Point& x) {
      const Point y = x - c;
      const double g = std::exp(-dot(y, y));
      return Point{-g * y[1], g * y[0], 0.0};
    };
  if (head == "const_e3") {
    require(dim == 3, "const_e3 needs a 3-D domain");
    return [](const Point&) { return Point{0.0, 0.0, 1.0}; };
  }
  if (head == "curl_bump")
    return [c](const Point& x) {
      const Point y = x - c;
      const double f = bump_factor(norm(y));
      return Point{f * y[1], -f * y[0], 0.0};
    };
  if (head == "perp_grad_sin") {
    require(dim == 2, "perp_grad_sin needs a 2-D domain");
    return [](const Point& x) {
      const double pi = std::numbers::pi;
      const double ax = pi * std::cos(pi * x[0]) * std::sin(pi * x[1]);
      const double ay = pi * std::sin(pi * x[0]) * std::cos(pi * x[1]);
      return Point{-ay, ax, 0.0};
    };
  }
  if (head == "zhikov") {
    require(domain.kind == DomainKind::UnitBall, "the zhikov drift lives on the unit ball");
    const SphericalPair& pair = default_pair();
    return [&pair](const Point& x) { return norm(x) > 0.0 ? zhikov_drift(pair, x) : Point{}; };
  }
  fail_validation("unknown vector field spec '" + spec + "'");
}

ScalarField sample_scalar(const MeshPtr& mesh, const ScalarFn& f, Sampling how) {
  if (how == Sampling::Vertex) {
    std::vector<double> v(mesh->num_vertices());
    parallel_for(v.size(), [&](std::size_t i) { v[i] = f(mesh->vertex(i)); });
    return ScalarField(mesh, Layout::Vertex, std::move(v));
  }
  std::vector<double> v(mesh->num_cells());
  if (how == Sampling::Centroid) {
    parallel_for(v.size(), [&](std::size_t k) { v[k] = f(mesh->centroid(k)); });
  } else {
    const auto& rule = high_order_rule(mesh->dim());
    parallel_for(v.size(), [&](std::size_t k) {
      double s = 0.0;
      for (std::size_t q = 0; q < rule.weights.size(); ++q)
        s += rule.weights[q] * f(mesh->map(k, rule.bary[q]));
      v[k] = s;
    });
  }
  return ScalarField(mesh, Layout::Cell, std::move(v));
}

ScalarField sample_scalar(const MeshPtr& mesh, const std::string& spec, Sampling how) {
  return sample_scalar(mesh, parse_scalar_spec(spec, mesh->domain()), how);
}

VectorField sample_vector(const MeshPtr& mesh, const VectorFn& f, Sampling how) {
  require(how != Sampling::Vertex, "vector fields are cellwise");
  const int dim = mesh->dim();
  std::vector<double> v(dim * mesh->num_cells());
  const auto& rule = high_order_rule(dim);
  parallel_for(mesh->num_cells(), [&](std::size_t k) {
    Point s{};
    if (how == Sampling::Centroid) {
      s = f(mesh->centroid(k));
    } else {
      for (std::size_t q = 0; q < rule.weights.size(); ++q)
        s = s + rule.weights[q] * f(mesh->map(k, rule.bary[q]));
    }
    for (int d = 0; d < dim; ++d) v[k * dim + d] = s[d];
  });
  return VectorField(mesh, std::move(v));
}

VectorField sample_vector(const MeshPtr& mesh, const std::string& spec, Sampling how) {
  if (spec.starts_with("curl:"))
    return discrete_curl(sample_scalar(mesh, spec.substr(5), Sampling::Vertex));
  return sample_vector(mesh, parse_vector_spec(spec, mesh->domain()), how);
}

VectorField discrete_curl(const ScalarField& psi) {
  require(psi.layout() == Layout::Vertex, "discrete curl needs a vertex-layout field");
  const auto g = gradient(psi);
  VectorField a = VectorField::zeros(psi.mesh());
  for (std::size_t k = 0; k < a.num_cells(); ++k) {
    const Point d = g.at(k);
    a.set(k, {d[1], -d[0], 0.0});
  }
  return a;
}

SkewField sample_skew(const MeshPtr& mesh, const ScalarFn& f, Sampling how) {
  require(how != Sampling::Vertex, "skew fields are cellwise");
  const auto entry = sample_scalar(mesh, f, how);
  const int per = mesh->dim() == 2 ? 1 : 3;
  std::vector<double> v(per * mesh->num_cells());
  for (std::size_t k = 0; k < mesh->num_cells(); ++k)
    for (int e = 0; e < per; ++e) v[k * per + e] = entry[k];
  return SkewField(mesh, std::move(v));
}

SkewField sample_skew(const MeshPtr& mesh, const std::string& spec, Sampling how) {
  if (spec == "none" || spec == "zero") return SkewField::zeros(mesh);
  const auto [head, arg] = split_spec(spec);
  if (head == "skew") return sample_skew(mesh, parse_scalar_spec(arg, mesh->domain()), how);
  if (head == "axial") {
    require(mesh->dim() == 3, "axial skew fields need a 3-D mesh");
    return SkewField::from_axial(sample_vector(mesh, arg, how));
  }
  if (head == "zhikov_potential") {
    require(mesh->domain().kind == DomainKind::UnitBall, "zhikov_potential lives on the unit ball");
    const SphericalPair& pair = default_pair();
    return SkewField::from_axial(sample_vector(
        mesh,
        [&pair](const Point& x) {
          return norm(x) > 0.0 ? zhikov_axial_potential(pair, x) : Point{};
        },
        how));
  }
  fail_validation("unknown skew field spec '" + spec +
                  "' (expected none, skew:<scalar>, axial:<vector> or zhikov_potential)");
}

SkewField random_skew(const MeshPtr& mesh, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int per = mesh->dim() == 2 ? 1 : 3;
  constexpr int modes = 4;
  struct Mode {
    Point k;
    double phase;
    double weight;
  };
  std::vector<std::array<Mode, modes>> table(per);
  for (int e = 0; e < per; ++e) {
    double total = 0.0;
    for (auto& m : table[e]) {
      m.k = {4.0 * unit(rng), 4.0 * unit(rng), 4.0 * unit(rng)};
      m.phase = std::numbers::pi * unit(rng);
      m.weight = unit(rng);
      total += std::abs(m.weight);
    }
    for (auto& m : table[e]) m.weight *= amplitude / total;
  }
  std::vector<double> v(per * mesh->num_cells());
  parallel_for(mesh->num_cells(), [&](std::size_t k) {
    const Point x = mesh->centroid(k);
    for (int e = 0; e < per; ++e) {
      double s = 0.0;
      for (const auto& m : table[e]) s += m.weight * std::sin(dot(m.k, x) + m.phase);
      v[k * per + e] = s;
    }
  });
  return SkewField(mesh, std::move(v));
}

SkewField constant_skew(const MeshPtr& mesh, double c) {
  const int per = mesh->dim() == 2 ? 1 : 3;
  return SkewField(mesh, std::vector<double>(per * mesh->num_cells(), c));
}

}  // namespace driftlab
