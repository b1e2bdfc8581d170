// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "driftlab/analytic.hpp"
#include "driftlab/error.hpp"
#include "driftlab/norms.hpp"
#include "driftlab/potentials.hpp"
#include "driftlab/solver.hpp"
#include "driftlab/truncation.hpp"
#include "driftlab/zhikov.hpp"

using namespace driftlab;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

MeshPtr mesh(const char* name, int res, double grading = 1.0) {
  MeshOptions o;
  o.radial_grading = grading;
  return build_mesh(Domain::parse(name), res, o);
}

Functional density(const MeshPtr& m, const std::string& spec) {
  Functional f;
  f.density = sample_scalar(m, spec, Sampling::CellAverage);
  return f;
}

double slope(double r0, double r1, double h0, double h1) {
  return std::log(r0 / r1) / std::log(h0 / h1);
}

Outcome zhikov_bracket() {
  const auto pair = build_pair();
  const auto t0 = std::chrono::steady_clock::now();
  const double b48 = bracket_value(pair, mesh("unit_ball", 48, 2.0), 0.05);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double b96 = bracket_value(pair, mesh("unit_ball", 96, 2.0), 0.025);
  return {std::abs(b48 + 1) <= 3e-2 && std::abs(b96 + 1) <= 1e-2 && secs <= 300,
          fmt("[u,u] = %.5f at (48, 0.05) in %.1fs, %.5f at (96, 0.025)", b48, secs, b96)};
}

Outcome energy_dichotomy() {
  ZhikovOptions o;
  const auto rep = nonuniqueness_report(o);
  const double dz = rep.main.defect_candidate;
  const double da = rep.approximation.energy_defect;
  return {std::abs(dz + 1) <= 5e-2 && da >= -1e-6,
          fmt("defect(u_Z) = %.5f, defect(approximation) = %.3e", dz, da)};
}

Outcome poisson_order() {
  std::vector<double> err, hs;
  for (int res : {32, 64, 128}) {
    auto m = mesh("unit_disk", res);
    const auto u = solve_truncated(m, SkewField::zeros(m), 1.0, density(m, "const:4"));
    err.push_back(l2_norm(u - sample_scalar(m, "paraboloid", Sampling::Vertex)));
    hs.push_back(m->h());
  }
  const double s1 = slope(err[0], err[1], hs[0], hs[1]);
  const double s2 = slope(err[1], err[2], hs[1], hs[2]);
  return {std::min(s1, s2) >= 1.8,
          fmt("L2 errors %.3e %.3e %.3e, orders %.3f %.3f", err[0], err[1], err[2], s1, s2)};
}

Outcome energy_identity() {
  auto m = mesh("unit_square", 32);
  const auto f = density(m, "sin_pi_product:1");
  SolverOptions o;
  o.krylov.rtol = 1e-12;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto u = solve_truncated(m, random_skew(m, seed, 5.0), 1e9, f, o);
    worst = std::max(worst, std::abs(energy_defect(u, f)));
  }
  return {worst <= 1e-8, fmt("max |(f,u) - |grad u|^2| over 10 drifts = %.3e", worst)};
}

Outcome bracket_diagonal() {
  double worst = 0.0, asym = 0.0;
  for (const char* d : {"unit_square", "unit_cube"}) {
    auto m = mesh(d, 12);
    const auto A = random_skew(m, 11, 10.0);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> c(-1, 1);
    auto random_u = [&] {
      std::vector<double> v(m->num_vertices());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = m->on_boundary(i) ? 0.0 : c(rng);
      return ScalarField(m, Layout::Vertex, v);
    };
    for (int i = 0; i < 20; ++i) {
      const auto u = random_u(), v = random_u();
      const double scale = A.max_abs() * h1_seminorm(u) * h1_seminorm(u);
      worst = std::max(worst, std::abs(bracket(u, u, A)) / scale);
      const double uv = bracket(u, v, A), vu = bracket(v, u, A);
      asym = std::max(asym, std::abs(uv + vu) / (A.max_abs() * h1_seminorm(u) * h1_seminorm(v)));
    }
  }
  return {worst <= 1e-14 && asym <= 1e-14,
          fmt("max |[u,u]|/(|A| |grad u|^2) = %.2e, max |[u,v]+[v,u]| (relative) = %.2e", worst,
              asym)};
}

Outcome gauge() {
  double worst = 0.0;
  for (auto [d, res] : {std::pair{"unit_disk", 32}, std::pair{"unit_ball", 10}}) {
    auto m = mesh(d, res);
    const auto f = density(m, "const:1");
    const auto A = random_skew(m, 5, 2.0);
    SolverOptions o;
    o.krylov.rtol = 1e-13;
    const auto u0 = solve_truncated(m, A, 1e9, f, o);
    const auto u1 = solve_truncated(m, A + constant_skew(m, 3.0), 1e9, f, o);
    worst = std::max(worst, h1_seminorm(u0 - u1));
  }
  return {worst <= 1e-9, fmt("max |grad(u - u_shifted)|_2 = %.3e", worst)};
}

Outcome norm_oracles() {
  const auto c = sample_scalar(mesh("unit_disk", 64, 3.0), "neg_log_r", Sampling::CellAverage);
  const auto f = sample_scalar(mesh("unit_disk", 128, 3.0), "neg_log_r", Sampling::CellAverage);
  const double L = growth_limit({c, f}, 64).limit;
  const double g = exp_gamma_star(c, f).gamma_star;
  const double prod = L * g * kE;
  const double target = 1.0 / (2 * kE);
  return {std::abs(L / target - 1) <= 0.10 && std::abs(g / 2 - 1) <= 0.15 &&
              std::abs(prod - 1) <= 0.20,
          fmt("L = %.4f (1/(2e) = %.4f), gamma* = %.3f, L gamma* e = %.3f", L, target, g, prod)};
}

Outcome morrey_oracle() {
  auto m = mesh("unit_ball", 48);
  const double v = morrey_norm(sample_scalar(m, "r_pow:-1", Sampling::CellAverage), 3.0).value;
  return {std::abs(v / (2 * kPi) - 1) <= 0.05, fmt("morrey = %.4f, 2 pi = %.4f", v, 2 * kPi)};
}

Outcome bmo_dichotomy() {
  auto m = mesh("unit_square", 512);
  const int depth = bmo_max_depth(*m);
  auto ratio = [&](const char* spec) {
    const auto p = bmo_norm(sample_scalar(m, spec, Sampling::CellAverage), depth).profile;
    return p[p.size() - 1].second / p[p.size() - 2].second;
  };
  const double flat = ratio("log_r"), grow = ratio("log_r_masked");
  return {flat <= 1.1 && grow >= 1.3,
          fmt("last-depth ratios: log|x| %.4f (<= 1.1), masked %.4f (>= 1.3), depth %d", flat,
              grow, depth)};
}

Outcome riesz_bounds() {
  auto m = mesh("unit_ball", 16);
  double worst = 0.0;
  int checked = 0;
  for (const char* spec : {"const:1", "r_pow:-0.5", "indicator_ball:0.3"}) {
    const auto g = sample_scalar(m, spec, Sampling::CellAverage);
    const auto Ig = riesz_potential(g);
    for (double p : {1.5, 2.0, 2.5, 4.0})
      for (double q : {1.5, 2.0, 3.0, 4.0, 8.0}) {
        const double d = 1 / p - 1 / q;
        if (d < 0 || d >= 1.0 / 3) continue;
        const double ratio = lp_norm(Ig, q) / ti1_bound(3, p, q, m->total_volume(), lp_norm(g, p));
        worst = std::max(worst, ratio);
        ++checked;
      }
  }
  auto fine = mesh("unit_ball", 24);
  const auto I1 = riesz_potential(sample_scalar(fine, "const:1", Sampling::CellAverage));
  double centre = 0.0;
  for (std::size_t v = 0; v < fine->num_vertices(); ++v)
    if (norm(fine->vertex(v)) < 1e-12) centre = I1[v];
  return {worst <= 1.0 && std::abs(centre / (4 * kPi) - 1) <= 0.02,
          fmt("max |I f|_q / bound = %.4f over %d pairs, I 1 (0) = %.4f (4 pi = %.4f)", worst,
              checked, centre, 4 * kPi)};
}

Outcome potential_residuals() {
  std::vector<std::string> parts;
  bool ok = true;
  auto measure = [&](const char* name, const char* dom, int r0, int r1, const char* field,
                     const std::function<SkewField(const VectorField&)>& build) {
    double res[2], hs[2];
    const int rs[2] = {r0, r1};
    for (int i = 0; i < 2; ++i) {
      auto m = mesh(dom, rs[i]);
      const auto a = sample_vector(m, field);
      res[i] = weak_div_residual(build(a), a, 200);
      hs[i] = m->h();
    }
    const double s = slope(res[0], res[1], hs[0], hs[1]);
    ok &= s >= 0.8;
    parts.push_back(fmt("%s %.2e -> %.2e slope %.2f", name, res[0], res[1], s));
  };
  measure("stream", "unit_disk", 16, 32, "rotation_gauss", stream_potential_2d);
  measure("poincare", "unit_ball", 8, 16, "rotation_gauss",
          [](const VectorField& a) { return poincare_potential_ball(a); });
  measure("newtonian", "unit_ball", 6, 12, "curl:bump", newtonian_potential);
  return {ok, parts[0] + "; " + parts[1] + "; " + parts[2]};
}

Outcome lipschitz_truncation_checks() {
  auto m = mesh("unit_square", 16);
  bool exact = true, lipschitz = true, converges = true;
  double worst_quotient = 0.0, worst_rise = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> c(-1, 1);
    std::array<double, 9> a{};
    for (auto& x : a) x = c(rng);
    auto u = sample_scalar(
        m,
        [&](const Point& x) {
          double s = 0.0;
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
              s += a[3 * i + j] * std::sin((i + 1) * kPi * x[0]) * std::sin((j + 1) * kPi * x[1]);
          return s;
        },
        Sampling::Vertex);
    for (std::size_t v = 0; v < u.size(); ++v)
      if (m->on_boundary(v)) u[v] = 0.0;
    const auto g = maximal_function(magnitude(gradient(u)));
    const double gmax = sup_norm(g);
    std::vector<double> errs;
    for (double lambda = gmax / 16; lambda <= 2 * gmax; lambda *= 2) {
      const auto t = lipschitz_truncation(u, g, lambda, 1.0);
      for (std::size_t v = 0; v < u.size(); ++v)
        if (t.in_good_set[v] && t.u_lambda[v] != u[v]) exact = false;
      const double q = pairwise_lipschitz(t.u_lambda) / lambda;
      worst_quotient = std::max(worst_quotient, q);
      if (q > 1 + 1e-12) lipschitz = false;
      errs.push_back(h1_seminorm(t.u_lambda - u));
    }
    for (std::size_t i = 1; i < errs.size(); ++i)
      if (errs[i - 1] > 0.0) worst_rise = std::max(worst_rise, errs[i] / errs[i - 1] - 1);
    // lambda reaches max g on the second to last level
    if (errs[errs.size() - 2] != 0.0 || errs.back() != 0.0) converges = false;
    if (errs[errs.size() - 3] >= errs.front()) converges = false;
  }
  return {exact && lipschitz && converges,
          fmt("u_lambda = u on F: %s, max quotient / (C lambda) = %.12f, H1 error reaches 0: %s "
              "(largest rise between doublings %.1f%%)",
              exact ? "yes" : "no", worst_quotient, converges ? "yes" : "no", 100 * worst_rise)};
}

Outcome null_tests() {
  double worst = 0.0;
  auto disk = mesh("unit_disk", 32, 2.0);
  worst = std::max(worst, null_test(disk, sample_skew(disk, "skew:neg_log_r"), default_schedule()));
  auto ball = mesh("unit_ball", 10, 2.0);
  worst = std::max(worst, null_test(ball, sample_skew(ball, "skew:neg_log_r"), default_schedule()));
  auto sq = mesh("unit_square", 32);
  worst = std::max(worst, null_test(sq, random_skew(sq, 3, 4.0), default_schedule()));
  return {worst <= 1e-8, fmt("max |grad u|_2 for f = 0 over three (ZC1) drifts = %.3e", worst)};
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Zhikov counterexample value", zhikov_bracket},
      {"energy dichotomy", energy_dichotomy},
      {"Poisson baseline", poisson_order},
      {"energy identity for bounded drifts", energy_identity},
      {"bracket vanishing diagonal", bracket_diagonal},
      {"gauge invariance", gauge},
      {"norm oracles", norm_oracles},
      {"Morrey oracle", morrey_oracle},
      {"BMO dichotomy", bmo_dichotomy},
      {"Riesz potential bounds", riesz_bounds},
      {"potential residuals", potential_residuals},
      {"Lipschitz truncation", lipschitz_truncation_checks},
      {"null test for (ZC1) drifts", null_tests},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2zu %s  %s: %s (%.1fs)\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first, o.detail.c_str(), secs);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
