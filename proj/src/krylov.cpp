#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

#include "driftlab/error.hpp"
#include "driftlab/sparse.hpp"

namespace driftlab {

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto begin = col.begin() + row_ptr[i];
  const auto end = col.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(begin, end, static_cast<std::int32_t>(j));
  if (it == end || *it != static_cast<std::int32_t>(j)) return 0.0;
  return val[it - col.begin()];
}

std::vector<double> CsrMatrix::multiply(const std::vector<double>& x) const {
  require(x.size() == cols, "matrix-vector size mismatch");
  std::vector<double> y(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s += val[p] * x[col[p]];
    y[i] = s;
  }
  return y;
}

double CsrMatrix::form(const std::vector<double>& x, const std::vector<double>& y) const {
  require(x.size() == rows && y.size() == cols, "bilinear form size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    double r = 0.0;
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) r += val[p] * y[col[p]];
    s += x[i] * r;
  }
  return s;
}

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

SpMat to_eigen(const CsrMatrix& m) {
  std::vector<Eigen::Triplet<double, int>> t;
  t.reserve(m.nonzeros());
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p)
      t.emplace_back(static_cast<int>(i), m.col[p], m.val[p]);
  SpMat a(static_cast<int>(m.rows), static_cast<int>(m.cols));
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

}  // namespace

KrylovResult gmres_solve(const CsrMatrix& m, const std::vector<double>& b,
                         const KrylovOptions& options) {
  require(m.rows == m.cols && b.size() == m.rows, "GMRES needs a square system");
  require(options.rtol > 0.0 && options.restart >= 1, "invalid Krylov options");
  const int n = static_cast<int>(m.rows);
  KrylovResult result;
  result.x.assign(n, 0.0);
  result.relative_residual = 1.0;
  if (n == 0) return result;

  const SpMat a = to_eigen(m);
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n);
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    result.relative_residual = 0.0;
    return result;
  }

  Eigen::IncompleteLUT<double, int> ilu;
  ilu.setDroptol(options.ilut_drop);
  ilu.setFillfactor(options.ilut_fill);
  ilu.compute(a);
  const bool precondition = ilu.info() == Eigen::Success;
  auto apply_m = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return precondition ? Eigen::VectorXd(ilu.solve(v)) : v;
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = rhs;
  double beta = bnorm;
  const int k = std::min(options.restart, n);
  std::vector<Eigen::VectorXd> v(k + 1), z(k);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(k + 1, k);
  Eigen::VectorXd cs(k), sn(k), g(k + 1);

  while (result.iterations < options.max_iterations) {
    v[0] = r / beta;
    g.setZero();
    g(0) = beta;
    int j = 0;
    for (; j < k && result.iterations < options.max_iterations; ++j) {
      z[j] = apply_m(v[j]);
      Eigen::VectorXd w = a * z[j];
      for (int i = 0; i <= j; ++i) {
        h(i, j) = w.dot(v[i]);
        w -= h(i, j) * v[i];
      }
      h(j + 1, j) = w.norm();
      const bool breakdown = h(j + 1, j) <= 1e-14 * std::abs(h(0, 0));
      if (!breakdown) v[j + 1] = w / h(j + 1, j);
      for (int i = 0; i < j; ++i) {
        const double t = cs(i) * h(i, j) + sn(i) * h(i + 1, j);
        h(i + 1, j) = -sn(i) * h(i, j) + cs(i) * h(i + 1, j);
        h(i, j) = t;
      }
      const double denom = std::hypot(h(j, j), h(j + 1, j));
      cs(j) = h(j, j) / denom;
      sn(j) = h(j + 1, j) / denom;
      h(j, j) = denom;
      h(j + 1, j) = 0.0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);
      ++result.iterations;
      const double estimate = std::abs(g(j + 1)) / bnorm;
      result.history.push_back(estimate);
      if (breakdown || estimate <= 0.5 * options.rtol) {
        ++j;
        break;
      }
    }
    Eigen::VectorXd y = h.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    for (int i = 0; i < j; ++i) x += y(i) * z[i];
    r = rhs - a * x;
    beta = r.norm();
    result.relative_residual = beta / bnorm;
    result.history.push_back(result.relative_residual);
    if (result.relative_residual <= options.rtol) break;
    if (!std::isfinite(beta)) break;
  }
  result.x.assign(x.data(), x.data() + n);
  if (!(result.relative_residual <= options.rtol))
    throw NumericalError("GMRES did not reach relative residual " + std::to_string(options.rtol) +
                             " after " + std::to_string(result.iterations) +
                             " iterations (last " + std::to_string(result.relative_residual) + ")",
                         result.history);
  return result;
}

}  // namespace driftlab
