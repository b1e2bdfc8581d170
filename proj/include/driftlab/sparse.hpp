#pragma once

#include <cstdint>
#include <vector>

namespace driftlab {

/// Compressed sparse row matrix with sorted column indices per row.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::int32_t> col;
  std::vector<double> val;

  /// Entry (i, j), zero if not stored.
  double at(std::size_t i, std::size_t j) const;
  std::vector<double> multiply(const std::vector<double>& x) const;
  /// x^T M y.
  double form(const std::vector<double>& x, const std::vector<double>& y) const;
  std::size_t nonzeros() const { return val.size(); }
};

struct KrylovOptions {
  double rtol = 1e-10;
  int restart = 80;
  int max_iterations = 4000;
  /// Incomplete LU(T) drop tolerance and fill factor.
  double ilut_drop = 1e-5;
  int ilut_fill = 20;
};

struct KrylovResult {
  std::vector<double> x;
  /// Relative residual estimate after every iteration, followed at the end
  /// of each restart cycle by the true value |b - Mx| / |b|.
  std::vector<double> history;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Right-preconditioned restarted GMRES with an incomplete LUT
/// preconditioner. Throws NumericalError carrying the residual history
/// when the tolerance is not reached.
KrylovResult gmres_solve(const CsrMatrix& m, const std::vector<double>& b,
                         const KrylovOptions& options = {});

}  // namespace driftlab
