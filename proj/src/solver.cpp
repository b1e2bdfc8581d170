#include "driftlab/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "driftlab/error.hpp"
#include "driftlab/parallel.hpp"

namespace driftlab {

namespace {

struct Entry {
  std::int32_t row;
  std::int32_t col;
  double val;
};

CsrMatrix to_csr(std::vector<Entry>& entries, std::size_t n) {
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m;
  m.rows = m.cols = n;
  m.row_ptr.assign(n + 1, 0);
  for (std::size_t p = 0; p < entries.size();) {
    std::size_t q = p;
    double s = 0.0;
    while (q < entries.size() && entries[q].row == entries[p].row &&
           entries[q].col == entries[p].col)
      s += entries[q++].val;
    m.col.push_back(entries[p].col);
    m.val.push_back(s);
    ++m.row_ptr[entries[p].row + 1];
    p = q;
  }
  for (std::size_t i = 0; i < n; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  return m;
}

void number_dofs(const Mesh& mesh, LinearSystem& sys) {
  sys.dof_of_vertex.assign(mesh.num_vertices(), -1);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    if (!mesh.on_boundary(v)) {
      sys.dof_of_vertex[v] = static_cast<std::int32_t>(sys.vertex_of_dof.size());
      sys.vertex_of_dof.push_back(static_cast<std::int32_t>(v));
    }
}

// Local cell matrix: local(i, j) couples test hat i with trial hat j.
using Local = std::array<std::array<double, 4>, 4>;

LinearSystem assemble_generic(const MeshPtr& mesh, const Functional& f,
                              const std::function<void(std::size_t, const CellGeometry&, Local&)>& cell) {
  require(mesh != nullptr, "assembly needs a mesh");
  require_same_mesh(mesh, f.mesh());
  LinearSystem sys;
  number_dofs(*mesh, sys);
  const int nv = mesh->vertices_per_cell();
  const std::size_t nc = mesh->num_cells();
  std::vector<Local> local(nc);
  parallel_for(nc, [&](std::size_t k) {
    const auto g = mesh->geometry(k);
    Local& m = local[k];
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nv; ++j) m[i][j] = g.volume * dot(g.grad[i], g.grad[j]);
    cell(k, g, m);
  });
  std::vector<Entry> entries;
  entries.reserve(nc * nv * nv);
  for (std::size_t k = 0; k < nc; ++k) {
    const auto idx = mesh->cell(k);
    for (int i = 0; i < nv; ++i) {
      const auto r = sys.dof_of_vertex[idx[i]];
      if (r < 0) continue;
      for (int j = 0; j < nv; ++j) {
        const auto c = sys.dof_of_vertex[idx[j]];
        if (c >= 0) entries.push_back({r, c, local[k][i][j]});
      }
    }
  }
  sys.matrix = to_csr(entries, sys.vertex_of_dof.size());
  const auto load = f.load_vector();
  sys.rhs.resize(sys.vertex_of_dof.size());
  for (std::size_t d = 0; d < sys.rhs.size(); ++d) sys.rhs[d] = load[sys.vertex_of_dof[d]];
  return sys;
}

}  // namespace

SkewField truncate_skew(const SkewField& A, double N) {
  require(N > 0.0, "truncation level must be positive");
  auto v = A.values();
  for (double& e : v) e = std::clamp(e, -N, N);
  return SkewField(A.mesh(), std::move(v));
}

VectorField truncate_vector(const VectorField& a, double N) {
  require(N > 0.0, "truncation level must be positive");
  auto v = a.values();
  for (double& e : v) e = std::clamp(e, -N, N);
  return VectorField(a.mesh(), std::move(v));
}

LinearSystem assemble(const MeshPtr& mesh, const SkewField& A, const Functional& f) {
  require_same_mesh(mesh, A.mesh());
  for (double e : A.values())
    if (!std::isfinite(e)) fail_validation("skew drift has non-finite entries; truncate first");
  const int nv = mesh->vertices_per_cell();
  return assemble_generic(mesh, f, [&](std::size_t k, const CellGeometry& g, Local& m) {
    for (int i = 0; i < nv; ++i)
      for (int j = i + 1; j < nv; ++j) {
        const double s = g.volume * dot(g.grad[i], A.apply(k, g.grad[j]));
        m[i][j] += s;
        m[j][i] -= s;
      }
  });
}

LinearSystem assemble_drift(const MeshPtr& mesh, const VectorField& a, const Functional& f,
                            ConvectionForm form) {
  require_same_mesh(mesh, a.mesh());
  const int nv = mesh->vertices_per_cell();
  return assemble_generic(mesh, f, [&](std::size_t k, const CellGeometry& g, Local& m) {
    const Point ak = a.at(k);
    const double share = g.volume / nv;
    if (form == ConvectionForm::Conservative) {
      for (int i = 0; i < nv; ++i) {
        const double c = share * dot(ak, g.grad[i]);
        for (int j = 0; j < nv; ++j) m[i][j] += c;
      }
      return;
    }
    for (int i = 0; i < nv; ++i)
      for (int j = i + 1; j < nv; ++j) {
        const double s = 0.5 * share * (dot(ak, g.grad[i]) - dot(ak, g.grad[j]));
        m[i][j] += s;
        m[j][i] -= s;
      }
  });
}

ScalarField solve_system(const MeshPtr& mesh, const LinearSystem& system,
                         const KrylovOptions& options, KrylovResult* record) {
  auto result = gmres_solve(system.matrix, system.rhs, options);
  std::vector<double> u(mesh->num_vertices(), 0.0);
  for (std::size_t d = 0; d < result.x.size(); ++d) u[system.vertex_of_dof[d]] = result.x[d];
  if (record) *record = std::move(result);
  return ScalarField(mesh, Layout::Vertex, std::move(u));
}

ScalarField solve_truncated(const MeshPtr& mesh, const SkewField& A, double N, const Functional& f,
                            const SolverOptions& options, KrylovResult* record) {
  const auto sys = assemble(mesh, truncate_skew(A, N), f);
  return solve_system(mesh, sys, options.krylov, record);
}

ScalarField solve_drift(const MeshPtr& mesh, const VectorField& a, double N, const Functional& f,
                        const SolverOptions& options, KrylovResult* record) {
  const auto sys = assemble_drift(mesh, truncate_vector(a, N), f, options.convection);
  return solve_system(mesh, sys, options.krylov, record);
}

double bracket(const ScalarField& u, const ScalarField& v, const SkewField& A) {
  require_same_mesh(u.mesh(), v.mesh());
  require_same_mesh(u.mesh(), A.mesh());
  const auto gu = gradient(u);
  const auto gv = gradient(v);
  const Mesh& m = *u.mesh();
  return parallel_sum(m.num_cells(), [&](std::size_t k) {
    return m.volume(k) * dot(A.apply(k, gu.at(k)), gv.at(k));
  });
}

double energy_defect(const ScalarField& u, const Functional& f) {
  const double h1 = h1_seminorm(u);
  return f.apply(u) - h1 * h1;
}

double discrete_poincare_constant(const MeshPtr& mesh) {
  LinearSystem sys;
  number_dofs(*mesh, sys);
  const int n = static_cast<int>(sys.vertex_of_dof.size());
  require(n > 0, "mesh has no interior vertices");
  const int nv = mesh->vertices_per_cell();
  std::vector<Eigen::Triplet<double>> ts, tm;
  for (std::size_t k = 0; k < mesh->num_cells(); ++k) {
    const auto g = mesh->geometry(k);
    const auto idx = mesh->cell(k);
    for (int i = 0; i < nv; ++i) {
      const int r = sys.dof_of_vertex[idx[i]];
      if (r < 0) continue;
      for (int j = 0; j < nv; ++j) {
        const int c = sys.dof_of_vertex[idx[j]];
        if (c < 0) continue;
        ts.emplace_back(r, c, g.volume * dot(g.grad[i], g.grad[j]));
        tm.emplace_back(r, c, g.volume * (i == j ? 2.0 : 1.0) / (nv * (nv + 1)));
      }
    }
  }
  Eigen::SparseMatrix<double> S(n, n), M(n, n);
  S.setFromTriplets(ts.begin(), ts.end());
  M.setFromTriplets(tm.begin(), tm.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(S);
  if (chol.info() != Eigen::Success) throw NumericalError("stiffness factorization failed");
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  double lambda = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Eigen::VectorXd y = chol.solve(M * x);
    y /= std::sqrt(y.dot(M * y));
    const double next = y.dot(S * y);
    x = y;
    if (it > 0 && std::abs(next - lambda) <= 1e-12 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return 1.0 / std::sqrt(lambda);
}

std::vector<double> default_schedule() {
  std::vector<double> s;
  for (int k = 0; k <= 10; ++k) s.push_back(std::ldexp(1.0, k));
  return s;
}

SolveReport approximation_solution(const MeshPtr& mesh, const SkewField& A, const Functional& f,
                                   const std::vector<double>& schedule,
                                   const SolverOptions& options) {
  require(!schedule.empty(), "truncation schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    require(schedule[i] > 0.0, "truncation levels must be positive");
    if (i > 0) require(schedule[i] > schedule[i - 1], "truncation schedule must be increasing");
  }
  SolveReport report;
  report.poincare_constant = discrete_poincare_constant(mesh);
  const double g_norm = f.density ? l2_norm(*f.density) : 0.0;
  const double flux_norm = f.flux ? l2_norm(*f.flux) : 0.0;
  const double bound = report.poincare_constant * g_norm + flux_norm;
  std::optional<ScalarField> previous;
  SkewField last_A;
  for (double N : schedule) {
    KrylovResult rec;
    last_A = truncate_skew(A, N);
    const auto sys = assemble(mesh, last_A, f);
    auto u = solve_system(mesh, sys, options.krylov, &rec);
    report.truncation_levels.push_back(N);
    report.linear_residuals.push_back(rec.relative_residual);
    report.iterations.push_back(rec.iterations);
    const double h1 = h1_seminorm(u);
    report.h1_norms.push_back(h1);
    report.apriori_bounds.push_back(bound);
    if (previous) report.increments.push_back(h1_seminorm(u - *previous));
    previous = u;
    report.u = std::move(u);
    if (!report.increments.empty() && report.increments.back() <= options.stop_rtol * h1) {
      report.converged = true;
      break;
    }
  }
  if (report.increments.empty()) report.converged = false;
  report.bracket_uu = bracket(report.u, report.u, last_A);
  report.energy_defect = energy_defect(report.u, f);
  return report;
}

double null_test(const MeshPtr& mesh, const SkewField& A, const std::vector<double>& schedule,
                 const SolverOptions& options) {
  Functional zero;
  zero.density = ScalarField::zeros(mesh, Layout::Cell);
  const auto report = approximation_solution(mesh, A, zero, schedule, options);
  return h1_seminorm(report.u);
}

}  // namespace driftlab
