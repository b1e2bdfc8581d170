#include "driftlab/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "driftlab/error.hpp"
#include "driftlab/norms.hpp"
#include "driftlab/parallel.hpp"

namespace driftlab {

TruncationResult lipschitz_truncation(const ScalarField& u, double lambda, double C) {
  require(u.layout() == Layout::Vertex, "Lipschitz truncation needs a vertex-layout field");
  return lipschitz_truncation(u, maximal_function(magnitude(gradient(u))), lambda, C);
}

TruncationResult lipschitz_truncation(const ScalarField& u, const ScalarField& g, double lambda,
                                      double C) {
  require(lambda > 0.0, "lambda must be positive");
  require(C > 0.0, "C must be positive");
  require(u.layout() == Layout::Vertex, "Lipschitz truncation needs a vertex-layout field");
  require(g.layout() == Layout::Vertex, "g must be a vertex-layout field");
  require_same_mesh(u.mesh(), g.mesh());
  const Mesh& m = *u.mesh();
  const std::size_t nv = m.num_vertices();
  for (std::size_t v = 0; v < nv; ++v)
    if (m.on_boundary(v) && u[v] != 0.0)
      fail_validation("Lipschitz truncation needs u = 0 on the boundary");

  TruncationResult res;
  res.g = g;
  res.lipschitz_bound = C * lambda;
  const double L = res.lipschitz_bound;
  res.in_good_set.assign(nv, 0);
  std::vector<std::size_t> good;
  for (std::size_t v = 0; v < nv; ++v)
    if (m.on_boundary(v) || g[v] <= lambda) {
      res.in_good_set[v] = 1;
      good.push_back(v);
    }

  auto violates = [&](std::size_t a, std::size_t b) {
    return std::abs(u[a] - u[b]) > L * norm(m.vertex(a) - m.vertex(b));
  };
  // Greedy pruning: drop the interior vertex with the most violations.
  std::vector<std::size_t> count(nv, 0);
  for (std::size_t i = 0; i < good.size(); ++i)
    for (std::size_t j = i + 1; j < good.size(); ++j)
      if (violates(good[i], good[j])) {
        ++count[good[i]];
        ++count[good[j]];
      }
  for (;;) {
    std::size_t worst = nv;
    for (auto v : good)
      if (res.in_good_set[v] && !m.on_boundary(v) && count[v] > 0 &&
          (worst == nv || count[v] > count[worst]))
        worst = v;
    if (worst == nv) break;
    res.in_good_set[worst] = 0;
    ++res.pruned;
    for (auto v : good)
      if (res.in_good_set[v] && violates(v, worst)) --count[v];
    count[worst] = 0;
  }
  std::vector<std::size_t> core;
  for (auto v : good)
    if (res.in_good_set[v]) core.push_back(v);

  std::vector<double> out(nv);
  parallel_for(nv, [&](std::size_t v) {
    if (res.in_good_set[v]) {
      out[v] = u[v];
      return;
    }
    const Point& x = m.vertex(v);
    double upper = std::numeric_limits<double>::infinity();
    double lower = -upper;
    for (auto y : core) {
      const double d = L * norm(x - m.vertex(y));
      upper = std::min(upper, u[y] + d);
      lower = std::max(lower, u[y] - d);
    }
    out[v] = 0.5 * (upper + lower);
  });
  res.u_lambda = ScalarField(u.mesh(), Layout::Vertex, std::move(out));
  return res;
}

double pairwise_lipschitz(const ScalarField& f) {
  require(f.layout() == Layout::Vertex, "pairwise Lipschitz quotient needs a vertex field");
  const Mesh& m = *f.mesh();
  double worst = 0.0;
  for (std::size_t a = 0; a < m.num_vertices(); ++a)
    for (std::size_t b = a + 1; b < m.num_vertices(); ++b) {
      const double d = norm(m.vertex(a) - m.vertex(b));
      if (d > 0.0) worst = std::max(worst, std::abs(f[a] - f[b]) / d);
    }
  return worst;
}

CaccioppoliTable caccioppoli_replay(const ScalarField& u, const SkewField& A,
                                    const std::vector<double>& lambdas, double C) {
  require_same_mesh(u.mesh(), A.mesh());
  require(!lambdas.empty(), "caccioppoli replay needs at least one lambda");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    require(lambdas[i] > 0.0, "lambda must be positive");
    if (i > 0) require(lambdas[i] > lambdas[i - 1], "lambdas must be increasing");
  }
  for (double e : A.values())
    if (!std::isfinite(e)) fail_validation("caccioppoli replay needs a bounded drift");
  const Mesh& m = *u.mesh();
  const std::size_t nc = m.num_cells();
  const auto grad = gradient(u);
  const auto g = maximal_function(magnitude(grad));
  std::vector<double> weight(nc);
  for (std::size_t k = 0; k < nc; ++k) weight[k] = m.volume(k) * (A.frobenius(k) + 1.0) * norm(grad.at(k));

  CaccioppoliTable table;
  table.C = C;
  for (double lambda : lambdas) {
    const auto tr = lipschitz_truncation(u, g, lambda, C);
    const auto grad_l = gradient(tr.u_lambda);
    CaccioppoliRow row;
    row.lambda = lambda;
    double outside = 0.0, max_grad = 0.0;
    for (std::size_t k = 0; k < nc; ++k) {
      bool level = true, core = true;
      for (auto v : m.cell(k)) {
        level &= g[v] <= lambda;
        core &= tr.in_good_set[v] != 0;
      }
      const Point gu = grad.at(k);
      const double sq = m.volume(k) * dot(gu, gu);
      if (level) row.lhs += sq;
      else row.rhs += weight[k];
      const Point gl = grad_l.at(k);
      const double t = m.volume(k) * dot(gu + A.apply(k, gu), gl);
      row.identity_defect += t;
      if (core) {
        row.lhs_core += sq;
      } else {
        row.interaction -= t;
        outside += weight[k];
        max_grad = std::max(max_grad, norm(gl));
      }
    }
    row.rhs *= C * lambda;
    row.rhs_effective = max_grad * outside;
    const double scale = std::max({row.lhs_core, std::abs(row.identity_defect), row.rhs_effective});
    row.holds = row.lhs_core - row.identity_defect <= row.rhs_effective + 1e-9 * scale;
    table.rows.push_back(row);
  }
  for (double eps : {0.2, 0.1, 0.05}) {
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
      const auto& a = table.rows[i];
      const auto& b = table.rows[i + 1];
      const double wa = eps * std::pow(a.lambda, -1.0 - eps);
      const double wb = eps * std::pow(b.lambda, -1.0 - eps);
      const double dl = b.lambda - a.lambda;
      lhs += 0.5 * (wa * a.lhs + wb * b.lhs) * dl;
      rhs += 0.5 * (wa * a.rhs + wb * b.rhs) * dl;
    }
    table.weighted.push_back({eps, lhs, rhs});
  }
  return table;
}

}  // namespace driftlab
