#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "driftlab/analytic.hpp"
#include "driftlab/error.hpp"
#include "driftlab/norms.hpp"
#include "driftlab/solver.hpp"
#include "driftlab/truncation.hpp"

using namespace driftlab;

namespace {

MeshPtr mesh(const char* name, int res) { return build_mesh(Domain::parse(name), res); }

/// Random trigonometric field on the unit square, zero on the boundary.
ScalarField random_field(const MeshPtr& m, std::uint64_t seed) {
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
            s += a[3 * i + j] * std::sin((i + 1) * std::numbers::pi * x[0]) *
                 std::sin((j + 1) * std::numbers::pi * x[1]);
        return s;
      },
      Sampling::Vertex);
  for (std::size_t v = 0; v < u.size(); ++v)
    if (m->on_boundary(v)) u[v] = 0.0;
  return u;
}

double brute_lipschitz(const ScalarField& f) {
  const Mesh& m = *f.mesh();
  double best = 0.0;
  for (std::size_t a = 0; a < f.size(); ++a)
    for (std::size_t b = a + 1; b < f.size(); ++b)
      best = std::max(best, std::abs(f[a] - f[b]) / norm(m.vertex(a) - m.vertex(b)));
  return best;
}

}  // namespace

TEST(PairwiseLipschitz, LinearFieldHasItsSlope) {
  auto m = mesh("unit_square", 8);
  const auto f = sample_scalar(m, "coord:0", Sampling::Vertex);
  EXPECT_NEAR(pairwise_lipschitz(f), 1.0, 1e-12);
  EXPECT_NEAR(pairwise_lipschitz(3.0 * f), 3.0, 1e-12);
}

TEST(Truncation, RandomFieldsKeepGoodSetAndLipschitzBound) {
  auto m = mesh("unit_square", 16);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto u = random_field(m, seed);
    const auto g = maximal_function(magnitude(gradient(u)));
    const double gmax = sup_norm(g);
    for (double frac : {0.1, 0.3, 0.6}) {
      const double lambda = frac * gmax;
      for (double C : {1.0, 2.0}) {
        const auto t = lipschitz_truncation(u, g, lambda, C);
        for (std::size_t v = 0; v < u.size(); ++v)
          if (t.in_good_set[v]) { ASSERT_EQ(t.u_lambda[v], u[v]); }
        EXPECT_LE(brute_lipschitz(t.u_lambda), C * lambda * (1 + 1e-12));
        EXPECT_LE(pairwise_lipschitz(t.u_lambda), C * lambda * (1 + 1e-12));
      }
    }
  }
}

TEST(Truncation, ConvergesInH1AsLambdaDoubles) {
  auto m = mesh("unit_square", 16);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto u = random_field(m, seed);
    const auto g = maximal_function(magnitude(gradient(u)));
    const double gmax = sup_norm(g);
    std::vector<double> err;
    for (double lambda = gmax / 16; lambda <= 2 * gmax; lambda *= 2)
      err.push_back(h1_seminorm(lipschitz_truncation(u, g, lambda).u_lambda - u));
    for (std::size_t i = 1; i < err.size(); ++i) EXPECT_LE(err[i], err[i - 1] * 1.05);
    EXPECT_EQ(err.back(), 0.0);
    EXPECT_EQ(err[err.size() - 2], 0.0);
    EXPECT_LT(err[err.size() - 3], err.front());
  }
}

TEST(Truncation, InputValidation) {
  auto m = mesh("unit_square", 4);
  const auto u = random_field(m, 1);
  EXPECT_THROW(lipschitz_truncation(u, 0.0), ValidationError);
  EXPECT_THROW(lipschitz_truncation(u, 1.0, -1.0), ValidationError);
  EXPECT_THROW(lipschitz_truncation(sample_scalar(m, "const:1", Sampling::Vertex), 1.0),
               ValidationError);
  EXPECT_THROW(lipschitz_truncation(sample_scalar(m, "const:1", Sampling::CellAverage), 1.0),
               ValidationError);
}

TEST(Caccioppoli, PoissonSolutionSatisfiesReplay) {
  auto m = mesh("unit_disk", 24);
  Functional f;
  f.density = sample_scalar(m, "const:4", Sampling::CellAverage);
  const auto A = SkewField::zeros(m);
  const auto u = solve_truncated(m, A, 1.0, f);
  const auto g = maximal_function(magnitude(gradient(u)));
  const double gmax = sup_norm(g);
  const auto table = caccioppoli_replay(u, A, {gmax / 4, gmax / 2, gmax});
  ASSERT_EQ(table.rows.size(), 3u);
  for (const auto& r : table.rows) {
    EXPECT_GE(r.lhs, r.lhs_core - 1e-14);
    EXPECT_GE(r.rhs_effective, 0.0);
    EXPECT_TRUE(r.holds);
  }
  // at lambda = max g nothing is truncated
  EXPECT_NEAR(table.rows.back().interaction, 0.0, 1e-12);
  EXPECT_NEAR(table.rows.back().lhs, h1_seminorm(u) * h1_seminorm(u), 1e-10);
}

TEST(Caccioppoli, NoTruncationAboveMaxG) {
  auto m = mesh("unit_square", 16);
  const auto A = random_skew(m, 4, 2.0);
  const auto u = random_field(m, 7);
  const auto g = maximal_function(magnitude(gradient(u)));
  const auto table = caccioppoli_replay(u, A, {2 * sup_norm(g)});
  const auto& r = table.rows.front();
  EXPECT_NEAR(r.lhs_core, r.lhs, 1e-12);
  EXPECT_NEAR(r.rhs, 0.0, 1e-14);
  EXPECT_NEAR(r.identity_defect, h1_seminorm(u) * h1_seminorm(u), 1e-10);
  EXPECT_TRUE(r.holds);
}

TEST(Caccioppoli, DriftedSolutionHoldsOnEveryLevel) {
  auto m = mesh("unit_square", 16);
  const auto A = random_skew(m, 2, 3.0);
  Functional f;
  f.density = sample_scalar(m, "bump", Sampling::CellAverage);
  const auto u = solve_truncated(m, A, 1e9, f);
  const double gmax = sup_norm(maximal_function(magnitude(gradient(u))));
  const auto table = caccioppoli_replay(u, A, {gmax / 8, gmax / 4, gmax / 2, gmax}, 1.5);
  for (const auto& r : table.rows) EXPECT_TRUE(r.holds) << r.lambda;
  ASSERT_EQ(table.weighted.size(), 3u);
  EXPECT_THROW(caccioppoli_replay(u, A, {2.0, 1.0}), ValidationError);
}
