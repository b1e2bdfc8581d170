#include "driftlab/zhikov.hpp"

#include <cmath>
#include <cstdio>

#include "driftlab/analytic.hpp"
#include "driftlab/error.hpp"
#include "driftlab/parallel.hpp"

namespace driftlab {

namespace {

void require_ball(const MeshPtr& mesh) {
  require(mesh != nullptr, "mesh is null");
  require(mesh->domain().kind == DomainKind::UnitBall, "the example lives on the unit ball");
}

VectorField excised_drift(const SphericalPair& pair, const MeshPtr& mesh, double rho) {
  VectorField a = VectorField::zeros(mesh);
  for (std::size_t k = 0; k < mesh->num_cells(); ++k) {
    const Point c = mesh->centroid(k);
    if (norm(c) >= rho) a.set(k, zhikov_drift(pair, c));
  }
  return a;
}

double excised_bracket(const SphericalPair& pair, const MeshPtr& mesh, double rho) {
  const auto a = excised_drift(pair, mesh, rho);
  const auto u = candidate_solution(pair, mesh);
  const auto gu = gradient(u);
  const Mesh& m = *mesh;
  return -parallel_sum(m.num_cells(), [&](std::size_t k) {
    return m.volume(k) * u.cell_mean(k) * dot(a.at(k), gu.at(k));
  });
}

// f = L u_Z in divergence form: (f, phi) = int (grad u_Z + b u_Z) . grad phi,
// b = -a the advecting drift of the example.
Functional candidate_functional(const ScalarField& u, const VectorField& a) {
  const MeshPtr& mesh = u.mesh();
  const auto gu = gradient(u);
  VectorField flux = VectorField::zeros(mesh);
  for (std::size_t k = 0; k < mesh->num_cells(); ++k)
    flux.set(k, -1.0 * (gu.at(k) - u.cell_mean(k) * a.at(k)));
  Functional f;
  f.flux = std::move(flux);
  return f;
}

ZhikovLevel measure_level(const SphericalPair& pair, int resolution, double rho, double grading) {
  MeshOptions opts;
  opts.radial_grading = grading;
  const auto mesh = build_mesh(Domain::parse("unit_ball"), resolution, opts);
  ZhikovLevel level;
  level.resolution = resolution;
  level.rho = rho;
  level.h = mesh->h();
  level.bracket = excised_bracket(pair, mesh, rho);
  const auto u = candidate_solution(pair, mesh);
  level.defect_candidate = energy_defect(u, candidate_functional(u, excised_drift(pair, mesh, rho)));
  return level;
}

}  // namespace

SphericalPair build_pair(int quadrature_order) {
  require(quadrature_order >= 3, "sphere quadrature order must be >= 3");
  const SphereRule rule = sphere_quadrature(quadrature_order);
  SphericalPair pair;
  pair.u0 = HarmonicExpansion({{1, 0, 1.0}});
  const HarmonicExpansion y20({{2, 0, 1.0}});
  const double moment = HarmonicExpansion::sphere_integral({&y20, &pair.u0, &pair.u0}, rule);
  if (std::abs(moment) < 1e-12)
    throw NumericalError("degenerate cubic moment in the sphere quadrature");
  pair.beta = -2.0 / moment;
  pair.a0 = y20.scaled(pair.beta);
  const auto c = pair_constraints(pair, quadrature_order);
  pair.mean_a0 = c[0];
  pair.moment_u0_a0 = c[1];
  pair.moment_a0_u0u0 = c[2];
  return pair;
}

std::array<double, 3> pair_constraints(const SphericalPair& pair, int quadrature_order) {
  const SphereRule rule = sphere_quadrature(quadrature_order);
  return {HarmonicExpansion::sphere_integral({&pair.a0}, rule),
          HarmonicExpansion::sphere_integral({&pair.u0, &pair.a0}, rule),
          HarmonicExpansion::sphere_integral({&pair.a0, &pair.u0, &pair.u0}, rule)};
}

Point zhikov_drift(const SphericalPair& pair, const Point& x) {
  const double r = norm(x);
  if (r == 0.0) return {};
  return (pair.a0(x) / (r * r * r)) * x;
}

double zhikov_candidate(const SphericalPair& pair, const Point& x) {
  const double r = norm(x);
  if (r == 0.0) return 0.0;
  const double r2 = r * r;
  return (1.0 - r2 * r2) * pair.u0(x);
}

Point zhikov_candidate_gradient(const SphericalPair& pair, const Point& x) {
  const double r = norm(x);
  if (r == 0.0) return {};
  const double r2 = r * r;
  return (-4.0 * r2 * pair.u0(x)) * x + (1.0 - r2 * r2) * pair.u0.gradient(x);
}

Point zhikov_axial_potential(const SphericalPair& pair, const Point& x) {
  const double r = norm(x);
  if (r == 0.0) return {};
  const HarmonicExpansion psi = pair.a0.inverse_laplace_beltrami();
  return (1.0 / r) * cross(x, psi.gradient(x));
}

VectorField drift_field(const SphericalPair& pair, const MeshPtr& mesh, double rho) {
  require_ball(mesh);
  require(rho > 0.0 && rho <= 0.1, "excision radius rho must lie in (0, 0.1]");
  return excised_drift(pair, mesh, rho);
}

ScalarField candidate_solution(const SphericalPair& pair, const MeshPtr& mesh) {
  require_ball(mesh);
  std::vector<double> u(mesh->num_vertices());
  for (std::size_t v = 0; v < u.size(); ++v)
    u[v] = mesh->on_boundary(v) ? 0.0 : zhikov_candidate(pair, mesh->vertex(v));
  return ScalarField(mesh, Layout::Vertex, std::move(u));
}

double bracket_value(const SphericalPair& pair, const MeshPtr& mesh, double rho) {
  require_ball(mesh);
  require(rho > 0.0 && rho <= 0.1, "excision radius rho must lie in (0, 0.1]");
  return excised_bracket(pair, mesh, rho);
}

ZhikovReport nonuniqueness_report(const ZhikovOptions& options) {
  require(options.resolution >= 4, "resolution must be >= 4");
  require(options.approximation_resolution >= 4, "approximation_resolution must be >= 4");
  require(options.rho > 0.0 && options.rho <= 0.1, "excision radius rho must lie in (0, 0.1]");
  require(options.trend_levels >= 0, "trend_levels must be >= 0");
  require(options.radial_grading >= 1.0, "radial_grading must be >= 1");
  ZhikovReport rep;
  rep.pair = build_pair();
  const auto& pair = rep.pair;

  rep.main = measure_level(pair, options.resolution, options.rho, options.radial_grading);
  for (int k = options.trend_levels; k >= 1; --k) {
    const int res = options.resolution >> k;
    if (res < 4) continue;
    rep.trend.push_back(measure_level(pair, res, options.rho * std::ldexp(1.0, k), options.radial_grading));
  }
  rep.trend.push_back(rep.main);

  MeshOptions mopts;
  mopts.radial_grading = options.radial_grading;
  const Domain ball = Domain::parse("unit_ball");
  SolverOptions sopts;
  sopts.krylov.rtol = options.rtol;

  auto approximate = [&](int res, SolveReport* out) {
    const auto mesh = build_mesh(ball, res, mopts);
    const auto u = candidate_solution(pair, mesh);
    const auto f = candidate_functional(u, excised_drift(pair, mesh, options.rho));
    const auto w = sample_vector(mesh, [&pair](const Point& x) {
      return zhikov_axial_potential(pair, x);
    });
    const SkewField A = SkewField::from_axial(-1.0 * w);
    auto report = approximation_solution(mesh, A, f, options.schedule, sopts);
    const double gap = h1_seminorm(report.u - u);
    if (out) *out = std::move(report);
    return gap;
  };
  rep.approximation_gap = approximate(options.approximation_resolution, &rep.approximation);
  rep.approximation_gap_coarse =
      approximate(std::max(4, options.approximation_resolution / 2), nullptr);

  std::vector<ScalarField> ladder;
  for (int k : {1, 0}) {
    const auto mesh = build_mesh(ball, std::max(4, options.resolution >> k), mopts);
    ladder.push_back(magnitude(excised_drift(pair, mesh, options.rho * std::ldexp(0.5, k))));
  }
  ClassifyOptions copts;
  copts.with_bmo = false;
  rep.drift_norms = classify_drift(ladder, copts);

  const double defect = rep.main.defect_candidate;
  rep.reproduced = std::abs(rep.main.bracket + 1.0) <= 3e-2 && std::abs(defect + 1.0) <= 5e-2 &&
                   rep.approximation.energy_defect >= -1e-6;
  char buf[128];
  std::snprintf(buf, sizeof buf, "nonapproximation defect %.2f +/- 0.05 reproduced: %s", defect,
                rep.reproduced ? "yes" : "no");
  rep.verdict = buf;
  return rep;
}

}  // namespace driftlab
