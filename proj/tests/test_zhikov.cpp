#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "driftlab/error.hpp"
#include "driftlab/zhikov.hpp"

using namespace driftlab;

namespace {

Point random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (;;) {
    Point x{u(rng), u(rng), u(rng)};
    if (norm(x) > 0.1) return x;
  }
}

template <class F>
Point fd_gradient(F f, const Point& x, double h = 1e-5) {
  Point g{};
  for (int i = 0; i < 3; ++i) {
    Point p = x, m = x;
    p[i] += h;
    m[i] -= h;
    g[i] = (f(p) - f(m)) / (2 * h);
  }
  return g;
}

MeshPtr graded_ball(int res) {
  MeshOptions o;
  o.radial_grading = 2.0;
  return build_mesh(Domain::parse("unit_ball"), res, o);
}

}  // namespace

TEST(Pair, ConstraintsHold) {
  const auto pair = build_pair();
  EXPECT_NEAR(pair.mean_a0, 0.0, 1e-13);
  EXPECT_NEAR(pair.moment_u0_a0, 0.0, 1e-13);
  EXPECT_NEAR(pair.moment_a0_u0u0, -2.0, 1e-12);
  // an independent, finer rule agrees
  const auto c = pair_constraints(pair, 20);
  EXPECT_NEAR(c[0], 0.0, 1e-12);
  EXPECT_NEAR(c[1], 0.0, 1e-12);
  EXPECT_NEAR(c[2], -2.0, 1e-12);
}

TEST(Pair, CandidateVanishesOnTheSphere) {
  const auto pair = build_pair();
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Point x = random_point(rng);
    EXPECT_NEAR(zhikov_candidate(pair, (1.0 / norm(x)) * x), 0.0, 1e-14);
  }
}

TEST(Pair, AnalyticGradientMatchesDifferences) {
  const auto pair = build_pair();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const Point x = random_point(rng);
    const Point g = zhikov_candidate_gradient(pair, x);
    const Point fd = fd_gradient([&](const Point& y) { return zhikov_candidate(pair, y); }, x);
    EXPECT_LT(norm(g - fd), 1e-7);
  }
}

TEST(Pair, DriftIsDivergenceFreeAndCurlOfPotential) {
  const auto pair = build_pair();
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const Point x = random_point(rng);
    std::array<Point, 3> dw{}, da{};
    for (int c = 0; c < 3; ++c) {
      dw[c] = fd_gradient([&](const Point& y) { return zhikov_axial_potential(pair, y)[c]; }, x);
      da[c] = fd_gradient([&](const Point& y) { return zhikov_drift(pair, y)[c]; }, x);
    }
    const Point curl{dw[2][1] - dw[1][2], dw[0][2] - dw[2][0], dw[1][0] - dw[0][1]};
    const Point a = zhikov_drift(pair, x);
    EXPECT_LT(norm(curl - a), 1e-5 * (1 + norm(a)));
    EXPECT_NEAR(da[0][0] + da[1][1] + da[2][2], 0.0, 1e-5 * (1 + norm(a)));
  }
}

TEST(Bracket, ApproachesMinusOneUnderRefinement) {
  const auto pair = build_pair();
  const double coarse = bracket_value(pair, graded_ball(12), 0.1);
  const double fine = bracket_value(pair, graded_ball(24), 0.05);
  EXPECT_LT(std::abs(fine + 1.0), std::abs(coarse + 1.0));
  EXPECT_LT(std::abs(fine + 1.0), 0.15);
}

TEST(Bracket, InputValidation) {
  const auto pair = build_pair();
  EXPECT_THROW(bracket_value(pair, graded_ball(4), 0.2), ValidationError);
  EXPECT_THROW(bracket_value(pair, graded_ball(4), 0.0), ValidationError);
  EXPECT_THROW(bracket_value(pair, build_mesh(Domain::parse("unit_cube"), 4), 0.05),
               ValidationError);
  EXPECT_THROW(build_pair(2), ValidationError);
  ZhikovOptions o;
  o.rho = 0.5;
  EXPECT_THROW(nonuniqueness_report(o), ValidationError);
  o.rho = 0.05;
  o.radial_grading = 0.5;
  EXPECT_THROW(nonuniqueness_report(o), ValidationError);
}

TEST(Report, CoarseRunIsConsistent) {
  ZhikovOptions o;
  o.resolution = 12;
  o.rho = 0.1;
  o.approximation_resolution = 8;
  o.trend_levels = 1;
  const auto rep = nonuniqueness_report(o);
  ASSERT_EQ(rep.trend.size(), 2u);
  EXPECT_EQ(rep.trend.back().resolution, 12);
  EXPECT_GE(rep.approximation.energy_defect, -1e-6);
  EXPECT_LT(rep.main.defect_candidate, -0.5);
  EXPECT_FALSE(rep.verdict.empty());
  EXPECT_EQ(rep.drift_norms.criteria.count("bounded"), 1u);
}
