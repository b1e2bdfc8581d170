#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "driftlab/analytic.hpp"
#include "driftlab/error.hpp"
#include "driftlab/norms.hpp"

using namespace driftlab;

namespace {

constexpr double kPi = std::numbers::pi;

MeshPtr mesh(const char* name, int res, double grading = 1.0) {
  MeshOptions o;
  o.radial_grading = grading;
  return build_mesh(Domain::parse(name), res, o);
}

ScalarField cells(const MeshPtr& m, const std::string& spec) {
  return sample_scalar(m, spec, Sampling::CellAverage);
}

ScalarField random_cells(const MeshPtr& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> v(m->num_cells());
  for (auto& x : v) x = u(rng);
  return ScalarField(m, Layout::Cell, v);
}

}  // namespace

TEST(LpNorm, Oracles) {
  auto sq = mesh("unit_square", 8);
  EXPECT_NEAR(lp_norm(cells(sq, "const:1"), 7.0), 1.0, 1e-14);
  EXPECT_NEAR(lp_norm(sample_scalar(sq, "coord:0", Sampling::Vertex), 2.0), 1.0 / std::sqrt(3.0), 1e-10);
  EXPECT_THROW(lp_norm(cells(sq, "const:1"), 0.5), ValidationError);
}

TEST(LpNorm, NegLogOnDisk) {
  // 2 pi int_0^inf t^4 e^{-2t} dt = pi 4! / 2^4.
  const double exact = std::pow(kPi * 24.0 / 16.0, 0.25);
  EXPECT_NEAR(lp_norm(cells(mesh("unit_disk", 128), "neg_log_r"), 4.0), exact, 2e-2);
}

TEST(LpNorm, JensenMonotonicity) {
  auto m = mesh("unit_disk", 8);
  const double vol = m->total_volume();
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = random_cells(m, s);
    double prev = 0.0;
    for (double p : {1.0, 1.5, 2.0, 3.0, 5.0, 8.0}) {
      const double n = lp_norm(f, p) * std::pow(vol, -1.0 / p);
      EXPECT_GE(n, prev * (1 - 1e-12));
      prev = n;
    }
  }
}

TEST(GrowthLimit, BoundedFieldGivesZero) {
  auto m = mesh("unit_square", 16);
  EXPECT_NEAR(growth_limit(cells(m, "const:5"), 64.0), 0.0, 1e-12);
}

TEST(GrowthLimit, NegLogMatchesStirling) {
  auto c = cells(mesh("unit_disk", 64, 3.0), "neg_log_r");
  auto f = cells(mesh("unit_disk", 128, 3.0), "neg_log_r");
  const auto est = growth_limit({c, f}, 64.0);
  EXPECT_NEAR(est.limit, 1.0 / (2.0 * std::numbers::e), 0.1 / (2.0 * std::numbers::e));
  EXPECT_EQ(est.samples.size(), 4u);
}

TEST(GrowthLimit, PowerSingularityIsFlaggedInfinite) {
  auto c = cells(mesh("unit_disk", 32), "r_pow:-0.5");
  auto f = cells(mesh("unit_disk", 64), "r_pow:-0.5");
  const auto est = growth_limit({c, f}, 64.0);
  EXPECT_TRUE(std::isinf(est.limit));
  for (std::size_t i = 1; i < est.samples.size(); ++i)
    EXPECT_GT(est.samples[i].second, est.samples[i - 1].second);
}

TEST(GrowthLimit, RejectsSmallPMax) {
  auto m = mesh("unit_square", 4);
  EXPECT_THROW(growth_limit(cells(m, "const:1"), 8.0), ValidationError);
}

TEST(ExpGamma, BoundedIsInfinite) {
  auto c = cells(mesh("unit_square", 16), "sin_pi_product:1");
  auto f = cells(mesh("unit_square", 32), "sin_pi_product:1");
  EXPECT_TRUE(std::isinf(exp_gamma_star(c, f).gamma_star));
}

TEST(ExpGamma, NegLogThresholdNearTwo) {
  auto c = cells(mesh("unit_disk", 64, 3.0), "neg_log_r");
  auto f = cells(mesh("unit_disk", 128, 3.0), "neg_log_r");
  EXPECT_NEAR(exp_gamma_star(c, f).gamma_star, 2.0, 0.3);
}

TEST(Bmo, ConstantAndInvariances) {
  auto m = mesh("unit_square", 64);
  const int depth = bmo_max_depth(*m);
  EXPECT_NEAR(bmo_norm(cells(m, "const:3"), depth).value, 0.0, 1e-12);
  const auto f = cells(m, "log_r");
  const double b = bmo_norm(f, depth).value;
  EXPECT_GT(b, 0.0);
  EXPECT_NEAR(bmo_norm(f + cells(m, "const:7"), depth).value, b, 1e-10);
  EXPECT_NEAR(bmo_norm(-2.5 * f, depth).value, 2.5 * b, 1e-10);
  EXPECT_THROW(bmo_norm(f, depth + 1), ValidationError);
}

TEST(Bmo, ProfileIsNondecreasing) {
  auto m = mesh("unit_square", 64);
  const auto r = bmo_norm(cells(m, "log_r_masked"), bmo_max_depth(*m));
  for (std::size_t i = 1; i < r.profile.size(); ++i) EXPECT_GE(r.profile[i].second, r.profile[i - 1].second);
}

TEST(Bmo, MaskedLogGrowsByHalfLogTwoPerDepth) {
  auto m = mesh("unit_square", 128);
  const auto r = bmo_norm(cells(m, "log_r_masked"), bmo_max_depth(*m));
  const auto& p = r.per_depth;
  ASSERT_GE(p.size(), 5u);
  for (std::size_t d = 2; d + 1 < p.size(); ++d) EXPECT_NEAR(p[d + 1] - p[d], 0.5 * std::log(2.0), 0.03);
}

TEST(Morrey, BoundedFieldIsFinite) {
  auto m = mesh("unit_ball", 12);
  const auto r = morrey_norm(cells(m, "const:1"), 3.0);
  EXPECT_GT(r.value, 0.0);
  EXPECT_LE(r.value, 4.0 * kPi / 3.0 * 2.0);
}

TEST(Morrey, InverseSquareGrowsUnderRefinement) {
  const double c = morrey_norm(cells(mesh("unit_ball", 8), "r_pow:-2"), 3.0).value;
  const double f = morrey_norm(cells(mesh("unit_ball", 16), "r_pow:-2"), 3.0).value;
  EXPECT_GE(f / c, 1.5);
}

TEST(GrandLebesgue, Oracles) {
  EXPECT_NEAR(grand_lebesgue_norm(cells(mesh("unit_square", 8), "const:1"), 2), 1.0, 1e-12);
  EXPECT_NEAR(grand_lebesgue_norm(cells(mesh("unit_cube", 4), "const:1"), 3), 2.0, 1e-12);
  const double c = grand_lebesgue_norm(cells(mesh("unit_disk", 64), "r_pow:-1"), 2);
  const double f = grand_lebesgue_norm(cells(mesh("unit_disk", 128), "r_pow:-1"), 2);
  EXPECT_NEAR(f, 2.0, 0.1);
  EXPECT_LT(f / c, 1.15);
  const double c2 = grand_lebesgue_norm(cells(mesh("unit_disk", 32), "r_pow:-2"), 2);
  const double f2 = grand_lebesgue_norm(cells(mesh("unit_disk", 64), "r_pow:-2"), 2);
  EXPECT_GE(f2 / c2, 1.5);
}

TEST(WeakNorm, IndicatorOracle) {
  // t |{|f| > t}|^(1/p) is maximised just below t = 1 for an indicator.
  auto m = mesh("unit_square", 32);
  const auto f = sample_scalar(m, "indicator_ball:0.25", Sampling::Centroid);
  double measure = 0.0;
  for (std::size_t k = 0; k < m->num_cells(); ++k) measure += f[k] * m->volume(k);
  EXPECT_NEAR(weak_norm(f, 2.0), std::sqrt(measure), 1e-9);
}

TEST(Maximal, ConstantAtCentre) {
  auto m = mesh("unit_ball", 12);
  const auto Mf = maximal_function(cells(m, "const:2"));
  for (std::size_t v = 0; v < m->num_vertices(); ++v)
    if (norm(m->vertex(v)) < 1e-12) { EXPECT_NEAR(Mf[v], 2.0, 0.03 * 2.0); }
}

TEST(Maximal, IndicatorAgainstBruteForce) {
  auto m = mesh("unit_ball", 16);
  const auto Mf = maximal_function(cells(m, "indicator_ball:0.5"));
  // Brute-force oracle: max over radii of the intersection fraction, by
  // deterministic Monte Carlo in each ball.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Point> unit;
  while (unit.size() < 40000) {
    Point p{u(rng), u(rng), u(rng)};
    if (norm(p) < 1.0) unit.push_back(p);
  }
  int checked = 0;
  for (std::size_t v = 0; v < m->num_vertices() && checked < 5; ++v) {
    const Point& x = m->vertex(v);
    if (std::abs(norm(x) - 0.75) > 0.03) continue;
    ++checked;
    double best = 0.0;
    for (double r = m->h(); r <= 2.0; r *= 2.0) {
      int hit = 0;
      for (const auto& p : unit) hit += norm(x + r * p) < 0.5;
      best = std::max(best, static_cast<double>(hit) / unit.size());
    }
    EXPECT_GT(Mf[v], 0.0);
    EXPECT_LT(Mf[v], 1.0);
    EXPECT_NEAR(Mf[v], best, 0.05 * best + 0.01);
  }
  EXPECT_GT(checked, 0);
}

TEST(Maximal, MonotoneAndHomogeneous) {
  auto m = mesh("unit_disk", 16);
  const auto f = cells(m, "bump");
  const auto g = f + cells(m, "const:0.5");
  const auto Mf = maximal_function(f), Mg = maximal_function(g), M3f = maximal_function(3.0 * f);
  for (std::size_t v = 0; v < m->num_vertices(); ++v) {
    EXPECT_LE(Mf[v], Mg[v] + 1e-12);
    EXPECT_NEAR(M3f[v], 3.0 * Mf[v], 1e-12 * (1 + Mf[v]));
    EXPECT_GT(Mf[v], 0.0);
  }
}

TEST(Riesz, ZeroAndMonotone) {
  auto m = mesh("unit_ball", 8);
  const auto I0 = riesz_potential(cells(m, "zero"));
  for (std::size_t v = 0; v < m->num_vertices(); ++v) EXPECT_EQ(I0[v], 0.0);
  const auto f = cells(m, "bump");
  const auto If = riesz_potential(f), Ig = riesz_potential(f + cells(m, "const:0.1"));
  for (std::size_t v = 0; v < m->num_vertices(); ++v) EXPECT_LE(If[v], Ig[v]);
}

TEST(Riesz, CentreValueOnCoarseBall) {
  auto m = mesh("unit_ball", 16);
  const auto I = riesz_potential(cells(m, "const:1"));
  for (std::size_t v = 0; v < m->num_vertices(); ++v)
    if (norm(m->vertex(v)) < 1e-12) { EXPECT_NEAR(I[v], 4.0 * kPi, 0.04 * 4.0 * kPi); }
}

TEST(Riesz, Ti1BoundOnCoarseBall) {
  auto m = mesh("unit_ball", 12);
  const auto f = cells(m, "const:1");
  const double lhs = lp_norm(riesz_potential(f), 4.0);
  EXPECT_LE(lhs, ti1_bound(3, 2.0, 4.0, m->total_volume(), lp_norm(f, 2.0)));
  EXPECT_THROW(ti1_bound(3, 1.0, 8.0, 1.0, 1.0), ValidationError);
}

TEST(Classify, BoundedDriftHoldsEverywhere) {
  std::vector<SkewField> ladder;
  for (int r : {16, 32}) ladder.push_back(sample_skew(mesh("unit_square", r), "skew:sin_pi_product:1"));
  const auto rep = classify_drift(ladder);
  for (const auto& [name, v] : rep.criteria) EXPECT_EQ(v, Verdict::Holds) << name;
  EXPECT_TRUE(rep.criteria.contains("BMO"));
}

TEST(Classify, LogEntriesSatisfyZc1) {
  // Frobenius norm of a 2-D skew matrix with entry f is sqrt(2)|f|.
  std::vector<SkewField> ladder;
  for (int r : {64, 128}) ladder.push_back(sample_skew(mesh("unit_disk", r, 3.0), "skew:neg_log_r"));
  ClassifyOptions o;
  o.with_bmo = false;
  const auto rep = classify_drift(ladder, o);
  EXPECT_EQ(rep.criteria.at("ZC1"), Verdict::Holds);
  EXPECT_NEAR(rep.growth_limit_L, std::sqrt(2.0) / (2.0 * std::numbers::e), 0.02);
  EXPECT_LE(rep.gamma_star * rep.growth_limit_L * std::numbers::e, 1.2);
}

TEST(Classify, RequiresTwoLevels) {
  std::vector<ScalarField> one{cells(mesh("unit_square", 4), "const:1")};
  EXPECT_THROW(classify_drift(one), ValidationError);
}

TEST(Refinement, Verdicts) {
  EXPECT_EQ(refinement_verdict(1.0, 1.0), Verdict::Holds);
  EXPECT_EQ(refinement_verdict(1.0, 1.6), Verdict::Fails);
  EXPECT_EQ(refinement_verdict(1.0, 1.3), Verdict::Inconclusive);
  EXPECT_STREQ(verdict_name(Verdict::Inconclusive), "inconclusive");
}
