#pragma once

#include <cstdint>
#include <vector>

#include "driftlab/fields.hpp"

namespace driftlab {

struct TruncationResult {
  ScalarField u_lambda;
  /// g = M|grad u| at vertices.
  ScalarField g;
  /// Vertices of the good set F(lambda) after pruning.
  std::vector<std::uint8_t> in_good_set;
  /// Vertices with g <= lambda that were dropped to make u|F Lipschitz.
  std::size_t pruned = 0;
  /// C * lambda.
  double lipschitz_bound = 0.0;
};

/// Symmetric McShane extension of u from F(lambda) = {g <= lambda} plus the
/// boundary vertices, with Lipschitz constant C lambda.
TruncationResult lipschitz_truncation(const ScalarField& u, double lambda, double C = 1.0);
/// Same with a precomputed g = M|grad u|.
TruncationResult lipschitz_truncation(const ScalarField& u, const ScalarField& g, double lambda,
                                      double C = 1.0);

/// max over vertex pairs of |f(x) - f(y)| / |x - y|.
double pairwise_lipschitz(const ScalarField& f);

struct CaccioppoliRow {
  double lambda = 0.0;
  /// int_{g <= lambda} |grad u|^2 over cells whose vertices all satisfy g <= lambda.
  double lhs = 0.0;
  /// Same over the cells of the pruned good set, where u_lambda = u.
  double lhs_core = 0.0;
  /// -int_{outside core} (I + A) grad u . grad u_lambda.
  double interaction = 0.0;
  /// int (I + A) grad u . grad u_lambda; zero for homogeneous solutions.
  double identity_defect = 0.0;
  /// C lambda int_{g > lambda} (|A| + 1) |grad u|.
  double rhs = 0.0;
  /// max |grad u_lambda| int_{outside core} (|A| + 1) |grad u|.
  double rhs_effective = 0.0;
  /// lhs_core - identity_defect <= rhs_effective.
  bool holds = false;
};

struct CaccioppoliTable {
  std::vector<CaccioppoliRow> rows;
  /// (epsilon, sum eps lambda^{-1-eps} lhs d lambda, same for rhs).
  std::vector<std::array<double, 3>> weighted;
  double C = 1.0;
};

CaccioppoliTable caccioppoli_replay(const ScalarField& u, const SkewField& A,
                                    const std::vector<double>& lambdas, double C = 1.0);

}  // namespace driftlab
