#include "driftlab/potentials.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <numbers>
#include <random>

#include "driftlab/error.hpp"
#include "driftlab/parallel.hpp"
#include "driftlab/quadrature.hpp"
#include "driftlab/spatial.hpp"

namespace driftlab {

namespace {

// |hat_v|_{H1 seminorm} and int a . grad hat_v for every vertex.
struct HatData {
  std::vector<double> grad_norm2;
  std::vector<double> flux;
};

HatData hat_fluxes(const VectorField& a) {
  const Mesh& m = *a.mesh();
  HatData d;
  d.grad_norm2.assign(m.num_vertices(), 0.0);
  d.flux.assign(m.num_vertices(), 0.0);
  for (std::size_t k = 0; k < m.num_cells(); ++k) {
    const auto g = m.geometry(k);
    const auto idx = m.cell(k);
    const Point ak = a.at(k);
    for (int i = 0; i < m.vertices_per_cell(); ++i) {
      d.grad_norm2[idx[i]] += g.volume * dot(g.grad[i], g.grad[i]);
      d.flux[idx[i]] += g.volume * dot(ak, g.grad[i]);
    }
  }
  return d;
}

}  // namespace

double solenoidality_residual(const VectorField& a) {
  const Mesh& m = *a.mesh();
  const double an = l2_norm(a);
  if (an == 0.0) return 0.0;
  const auto d = hat_fluxes(a);
  double worst = 0.0;
  for (std::size_t v = 0; v < m.num_vertices(); ++v)
    if (!m.on_boundary(v)) worst = std::max(worst, std::abs(d.flux[v]) / std::sqrt(d.grad_norm2[v]));
  return worst / an;
}

void require_solenoidal(const VectorField& a, double tolerance) {
  const double r = solenoidality_residual(a);
  if (!(r <= tolerance))
    fail_validation("vector field is not weakly divergence-free: relative residual " +
                    std::to_string(r) + " exceeds " + std::to_string(tolerance));
}

ScalarField stream_function_2d(const VectorField& a) {
  const MeshPtr& mesh = a.mesh();
  require(mesh->dim() == 2, "stream functions are defined in 2-D only");
  require_solenoidal(a);
  const std::size_t nv = mesh->num_vertices();
  // vertex 0 is pinned; unknowns are vertices 1..nv-1
  const int n = static_cast<int>(nv) - 1;
  std::vector<Eigen::Triplet<double>> ts;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < mesh->num_cells(); ++k) {
    const auto g = mesh->geometry(k);
    const auto idx = mesh->cell(k);
    const Point ak = a.at(k);
    const Point target{ak[1], -ak[0], 0.0};
    for (int i = 0; i < 3; ++i) {
      const int r = idx[i] - 1;
      if (r < 0) continue;
      rhs[r] += g.volume * dot(target, g.grad[i]);
      for (int j = 0; j < 3; ++j) {
        const int c = idx[j] - 1;
        if (c >= 0) ts.emplace_back(r, c, g.volume * dot(g.grad[i], g.grad[j]));
      }
    }
  }
  Eigen::SparseMatrix<double> S(n, n);
  S.setFromTriplets(ts.begin(), ts.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(S);
  if (chol.info() != Eigen::Success) throw NumericalError("stream function factorization failed");
  const Eigen::VectorXd x = chol.solve(rhs);
  std::vector<double> alpha(nv, 0.0);
  for (int i = 0; i < n; ++i) alpha[i + 1] = x[i];
  ScalarField field(mesh, Layout::Vertex, std::move(alpha));
  const double mean = integrate(field) / mesh->total_volume();
  for (double& v : field.values()) v -= mean;
  return field;
}

SkewField stream_potential_2d(const VectorField& a) {
  return SkewField::from_scalar(stream_function_2d(a));
}

VectorField poincare_axial_vector(const VectorField& a, int nodes) {
  const MeshPtr& mesh = a.mesh();
  require(mesh->domain().kind == DomainKind::UnitBall,
          "the ball potential needs the unit_ball domain");
  require(nodes >= 32, "the line integral needs at least 32 nodes");
  require_solenoidal(a);
  const int per_panel = 4;
  const int panels = (nodes + per_panel - 1) / per_panel;
  const auto gl = gauss_legendre(per_panel, 0.0, 1.0);
  std::vector<double> ts, ws;
  for (int p = 0; p < panels; ++p)
    for (int q = 0; q < per_panel; ++q) {
      ts.push_back((p + gl.nodes[q]) / panels);
      ws.push_back(gl.weights[q] / panels);
    }
  const PointLocator locator(mesh);
  VectorField w = VectorField::zeros(mesh);
  parallel_for(mesh->num_cells(), [&](std::size_t k) {
    const Point x = mesh->centroid(k);
    Point sum{};
    for (std::size_t q = 0; q < ts.size(); ++q) {
      const Point y = ts[q] * x;
      sum = sum + (ws[q] * ts[q]) * cross(a.at(locator.locate(y)), x);
    }
    w.set(k, sum);
  });
  return w;
}

SkewField poincare_potential_ball(const VectorField& a, int nodes) {
  return SkewField::from_axial(poincare_axial_vector(a, nodes));
}

double boundary_flux_residual(const VectorField& a) {
  const Mesh& m = *a.mesh();
  const double an = l2_norm(a);
  if (an == 0.0) return 0.0;
  const int dim = m.dim();
  std::vector<std::function<Point(const Point&)>> grads;
  for (int i = 0; i < dim; ++i) {
    grads.push_back([i](const Point&) {
      Point g{};
      g[i] = 1.0;
      return g;
    });
    grads.push_back([i](const Point& x) {
      Point g{};
      g[i] = 2.0 * x[i];
      return g;
    });
    for (int j = i + 1; j < dim; ++j)
      grads.push_back([i, j](const Point& x) {
        Point g{};
        g[i] = x[j];
        g[j] = x[i];
        return g;
      });
  }
  double worst = 0.0;
  for (const auto& grad : grads) {
    double flux = 0.0, norm2 = 0.0;
    const auto& rule = degree2_rule(dim);
    for (std::size_t k = 0; k < m.num_cells(); ++k) {
      const Point c = m.centroid(k);
      flux += m.volume(k) * dot(a.at(k), grad(c));
      for (std::size_t q = 0; q < rule.weights.size(); ++q) {
        const Point g = grad(m.map(k, rule.bary[q]));
        norm2 += m.volume(k) * rule.weights[q] * dot(g, g);
      }
    }
    worst = std::max(worst, std::abs(flux) / std::sqrt(norm2));
  }
  const auto d = hat_fluxes(a);
  for (std::size_t v = 0; v < m.num_vertices(); ++v)
    if (m.on_boundary(v)) worst = std::max(worst, std::abs(d.flux[v]) / std::sqrt(d.grad_norm2[v]));
  return worst / an;
}

SkewField newtonian_potential(const VectorField& a) {
  const MeshPtr& mesh = a.mesh();
  require(mesh->dim() == 3, "the Newtonian construction is implemented in 3-D");
  require_solenoidal(a);
  const double trace = boundary_flux_residual(a);
  if (trace > kSolenoidalTolerance)
    fail_validation("vector field has a nonzero normal trace (boundary flux residual " +
                    std::to_string(trace) +
                    "); use poincare_potential_ball for fields not tangent to the boundary");
  const std::size_t nv = mesh->num_vertices();
  const std::size_t nc = mesh->num_cells();
  const CellTree tree(mesh);
  std::array<CellTree::Weights, 3> weights;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> comp(nc);
    for (std::size_t k = 0; k < nc; ++k) comp[k] = a.at(k)[c];
    weights[c] = tree.aggregate(comp);
  }
  std::array<std::vector<double>, 3> V;
  for (auto& v : V) v.assign(nv, 0.0);
  const double scale = 1.0 / (4.0 * std::numbers::pi);
  parallel_for(nv, [&](std::size_t v) {
    const Point& x = mesh->vertex(v);
    std::vector<std::pair<std::size_t, double>> cache;
    auto geometric = [&](std::size_t k) {
      for (const auto& [key, val] : cache)
        if (key == k) return val;
      SimplexCorners s{};
      const auto idx = mesh->cell(k);
      int self = -1;
      for (int i = 0; i < 4; ++i) {
        s[i] = mesh->vertex(idx[i]);
        if (static_cast<std::size_t>(idx[i]) == v) self = i;
      }
      double g;
      if (self >= 0) {
        std::swap(s[0], s[self]);
        g = singular_simplex_integral(s, 3, 1.0);
      } else {
        g = regular_simplex_integral(s, 3, x, 1.0, 1);
      }
      cache.emplace_back(k, g);
      return g;
    };
    for (int c = 0; c < 3; ++c) {
      const auto& w = weights[c];
      V[c][v] = scale * tree.kernel_sum(
                            w, x, [](double d) { return 1.0 / d; }, 0.2, 3.0,
                            [&](std::size_t k) { return w.cell_mass[k] / mesh->volume(k) * geometric(k); });
    }
  });
  std::array<VectorField, 3> dV;
  for (int c = 0; c < 3; ++c) dV[c] = gradient(ScalarField(mesh, Layout::Vertex, V[c]));
  std::vector<double> out(3 * nc);
  for (std::size_t k = 0; k < nc; ++k) {
    const Point g0 = dV[0].at(k), g1 = dV[1].at(k), g2 = dV[2].at(k);
    out[3 * k + 0] = g0[1] - g1[0];
    out[3 * k + 1] = g0[2] - g2[0];
    out[3 * k + 2] = g1[2] - g2[1];
  }
  return SkewField(mesh, std::move(out));
}

double weak_div_residual(const SkewField& A, const VectorField& a, int test_count,
                         std::uint64_t seed) {
  require_same_mesh(A.mesh(), a.mesh());
  require(test_count >= 0, "test_count must be nonnegative");
  const MeshPtr& mesh = A.mesh();
  const Mesh& m = *mesh;
  const int dim = m.dim();
  const int nvc = m.vertices_per_cell();

  // residual of one P1 test function given by vertex values
  auto residual = [&](const std::vector<double>& phi) {
    Point r{};
    double l2 = 0.0, h1 = 0.0;
    for (std::size_t k = 0; k < m.num_cells(); ++k) {
      const auto idx = m.cell(k);
      double sum = 0.0, sq = 0.0;
      bool active = false;
      for (int i = 0; i < nvc; ++i) {
        const double p = phi[idx[i]];
        active |= p != 0.0;
        sum += p;
        sq += p * p;
      }
      if (!active) continue;
      const auto g = m.geometry(k);
      Point grad{};
      for (int i = 0; i < nvc; ++i) grad = grad + phi[idx[i]] * g.grad[i];
      const double mean = sum / nvc;
      const Point Ag = A.apply(k, grad);
      const Point ak = a.at(k);
      for (int i = 0; i < dim; ++i) r[i] += g.volume * (ak[i] * mean - Ag[i]);
      l2 += g.volume * (sum * sum + sq) / (nvc * (nvc + 1));
      h1 += g.volume * dot(grad, grad);
    }
    double worst = 0.0;
    for (int i = 0; i < dim; ++i) worst = std::max(worst, std::abs(r[i]));
    const double norm = std::sqrt(l2 + h1);
    return norm > 0.0 ? worst / norm : 0.0;
  };

  std::vector<std::size_t> interior;
  for (std::size_t v = 0; v < m.num_vertices(); ++v)
    if (!m.on_boundary(v)) interior.push_back(v);
  std::vector<double> phi(m.num_vertices(), 0.0);
  double worst = 0.0;
  if (test_count > 0 && !interior.empty()) {
    const std::size_t count = std::min<std::size_t>(test_count, interior.size());
    for (std::size_t t = 0; t < count; ++t) {
      const std::size_t v = interior[t * interior.size() / count];
      phi[v] = 1.0;
      worst = std::max(worst, residual(phi));
      phi[v] = 0.0;
    }
  }

  const Domain& dom = m.domain();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    struct Mode {
      Point k;
      double phase, amp;
    };
    std::array<Mode, 3> modes{};
    for (auto& md : modes) {
      for (int d = 0; d < dim; ++d) md.k[d] = 3.0 * uni(rng);
      md.phase = std::numbers::pi * uni(rng);
      md.amp = uni(rng);
    }
    for (std::size_t v = 0; v < m.num_vertices(); ++v) {
      const Point& x = m.vertex(v);
      double bubble;
      if (dom.is_round()) {
        bubble = 1.0 - dot(x, x);
      } else {
        bubble = 1.0;
        for (int d = 0; d < dim; ++d) bubble *= 4.0 * x[d] * (1.0 - x[d]);
      }
      double s = 0.0;
      for (const auto& md : modes) s += md.amp * std::cos(dot(md.k, x) + md.phase);
      phi[v] = m.on_boundary(v) ? 0.0 : bubble * s;
    }
    worst = std::max(worst, residual(phi));
  }
  return worst;
}

}  // namespace driftlab
