#pragma once

#include <vector>

#include "driftlab/fields.hpp"
#include "driftlab/norms.hpp"
#include "driftlab/solver.hpp"
#include "driftlab/sphere.hpp"

namespace driftlab {

/// Angular profiles of the example: u0 of degree 1, a0 = beta * Y_20.
struct SphericalPair {
  HarmonicExpansion a0;
  HarmonicExpansion u0;
  double beta = 0.0;
  /// Constraint integrals measured with the construction rule.
  double mean_a0 = 0.0;
  double moment_u0_a0 = 0.0;
  double moment_a0_u0u0 = 0.0;
};

/// Builds the pair with beta solved from the cubic moment.
SphericalPair build_pair(int quadrature_order = 10);

/// Constraint integrals (int a0, int u0 a0, int a0 u0^2) with a given rule.
std::array<double, 3> pair_constraints(const SphericalPair& pair, int quadrature_order);

/// a(x) = a0(x/|x|) x / |x|^3.
Point zhikov_drift(const SphericalPair& pair, const Point& x);
/// u(x) = (1 - |x|^4) u0(x/|x|), with u(0) = 0.
double zhikov_candidate(const SphericalPair& pair, const Point& x);
/// Analytic gradient of the candidate.
Point zhikov_candidate_gradient(const SphericalPair& pair, const Point& x);
/// Axial vector w with curl w = a away from the origin:
/// w = (x cross grad psi)/|x| where Delta_S psi = a0.
Point zhikov_axial_potential(const SphericalPair& pair, const Point& x);

/// Drift sampled at centroids, zero on cells whose centroid lies in B_rho.
VectorField drift_field(const SphericalPair& pair, const MeshPtr& mesh, double rho);
ScalarField candidate_solution(const SphericalPair& pair, const MeshPtr& mesh);
/// -int_{B_1 \ B_rho} a . u grad u.
double bracket_value(const SphericalPair& pair, const MeshPtr& mesh, double rho);

struct ZhikovLevel {
  int resolution = 0;
  double rho = 0.0;
  double h = 0.0;
  double bracket = 0.0;
  double defect_candidate = 0.0;
};

struct ZhikovOptions {
  int resolution = 48;
  double rho = 0.05;
  /// Resolution of the mesh used for the approximation solution.
  int approximation_resolution = 24;
  std::vector<double> schedule{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
  /// Coarser (resolution, rho) levels used for the refinement trend; each
  /// level halves resolution and doubles rho relative to the next.
  int trend_levels = 3;
  double radial_grading = 2.0;
  double rtol = 1e-10;
  std::uint64_t seed = 1;
};

struct ZhikovReport {
  SphericalPair pair;
  ZhikovLevel main;
  std::vector<ZhikovLevel> trend;
  /// Energy defect of the approximation solution for f = L u_Z.
  SolveReport approximation;
  double approximation_gap = 0.0;
  /// Same quantity one resolution below, for the refinement check.
  double approximation_gap_coarse = 0.0;
  NormReport drift_norms;
  bool reproduced = false;
  std::string verdict;
};

ZhikovReport nonuniqueness_report(const ZhikovOptions& options);

}  // namespace driftlab
