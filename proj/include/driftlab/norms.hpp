#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "driftlab/fields.hpp"

namespace driftlab {

enum class Verdict { Holds, Fails, Inconclusive };
const char* verdict_name(Verdict v);

/// Refinement thresholds: a quantity that grows by at least `diverge`
/// between the two finest levels diverges; at most `stable` is bounded.
struct Refinement {
  double diverge = 1.5;
  double stable = 1.15;
};
Verdict refinement_verdict(double coarse, double fine, const Refinement& rule = {});

/// (int |f|^p)^(1/p), evaluated through scaled moments so large p cannot
/// overflow. Vertex fields use the high-order rule, cell fields are exact.
double lp_norm(const ScalarField& f, double p);
/// int |f|^p.
double lp_modular(const ScalarField& f, double p);
double sup_norm(const ScalarField& f);

struct GrowthEstimate {
  /// (p, |f|_p) on the finest level.
  std::vector<std::pair<double, double>> samples;
  /// Samples whose p^-1 |f|_p is stable under the last refinement.
  std::vector<double> resolved;
  /// Extrapolated lim p^-1 |f|_p; +inf when no sample is resolved.
  double limit = 0.0;
};

/// Estimate of lim p^-1 |f|_p from a refinement sequence (coarse to fine)
/// of the same function, p in {8, 16, ..., p_max}.
GrowthEstimate growth_limit(const std::vector<ScalarField>& ladder, double p_max,
                            double stability = 0.02);
/// Single-level variant using every sample.
double growth_limit(const ScalarField& f, double p_max);

struct GammaEstimate {
  double gamma_star = 0.0;
  /// 1 / (e L) from the growth limit when available.
  double cross_check = 0.0;
  /// Growth of max|f| under the refinement.
  double sup_growth = 0.0;
};

/// Largest gamma with int exp(gamma |f|) stable under one refinement:
/// log(V_fine / V_coarse) / (T_fine - T_coarse) < tau with T = max|f|.
/// +inf when |f| is bounded (T does not grow).
GammaEstimate exp_gamma_star(const ScalarField& coarse, const ScalarField& fine,
                             double tau = 0.1);
/// log int exp(gamma |f|).
double log_exp_integral(const ScalarField& f, double gamma);

struct BmoResult {
  double value = 0.0;
  /// Running supremum per depth (nondecreasing).
  std::vector<std::pair<int, double>> profile;
  /// Largest mean oscillation found at each depth alone.
  std::vector<double> per_depth;
};

/// Sup of the mean oscillation over dyadic cubes of the bounding box and
/// their half-shifted translates that lie inside the domain.
BmoResult bmo_norm(const ScalarField& f, int max_depth);
/// Deepest admissible depth: cube side at least twice the mesh size.
int bmo_max_depth(const Mesh& mesh);

struct MorreyResult {
  double value = 0.0;
  Point center{};
  double radius = 0.0;
};

/// sup R^{-n(1-1/p)} int_{B_R} |f| over vertex-centred balls with radii
/// diam * 2^-k >= 2h.
MorreyResult morrey_norm(const ScalarField& f, double p);

/// sup over s in {1, 1+d, ..., n-d}, d = 2^-6 (n-1), of
/// ((n - s) |Omega|^-1 int |f|^s)^(1/s).
double grand_lebesgue_norm(const ScalarField& f, int n);

/// sup_t t |{|f| > t}|^(1/p).
double weak_norm(const ScalarField& f, double p);

/// Centred maximal function of the zero extension, at vertices, over radii
/// h * 2^k up to diam; also bounded below by |f| near each vertex.
ScalarField maximal_function(const ScalarField& f);

/// int |x - y|^{1-n} |f(y)| dy at vertices.
ScalarField riesz_potential(const ScalarField& f);

/// Right-hand side of the L^p -> L^q potential estimate.
double ti1_bound(int n, double p, double q, double measure, double f_lp);
/// Right-hand side of the Morrey estimate for int |I f|^q.
double mp1_bound(int n, double q, double diameter, double morrey);

/// Log-log slope of eps^power * |f|_{base - eps} over eps in {1/2,...,1/16}.
double epsilon_slope(const ScalarField& f, double base, double power);

struct NormReport {
  std::vector<std::pair<double, double>> lp_samples;
  double growth_limit_L = 0.0;
  double gamma_star = 0.0;
  double bmo = 0.0;
  std::vector<std::pair<int, double>> bmo_depth_profile;
  double morrey_n = 0.0;
  double grand_lebesgue_n = 0.0;
  double weak_n = 0.0;
  /// Per criterion: the two finest-level values that were compared.
  std::map<std::string, std::pair<double, double>> evidence;
  std::map<std::string, Verdict> criteria;
};

struct ClassifyOptions {
  double p_max = 64.0;
  Refinement rule;
  bool with_bmo = true;
};

/// Classifies a drift magnitude (|A| Frobenius or |a| Euclidean) sampled on
/// a refinement sequence (coarse to fine, at least two levels).
NormReport classify_drift(const std::vector<ScalarField>& magnitudes,
                          const ClassifyOptions& options = {});
NormReport classify_drift(const std::vector<SkewField>& ladder, const ClassifyOptions& options = {});
NormReport classify_drift(const std::vector<VectorField>& ladder,
                          const ClassifyOptions& options = {});

}  // namespace driftlab
