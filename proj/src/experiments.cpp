#include "driftlab/experiments.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "driftlab/analytic.hpp"
#include "driftlab/error.hpp"
#include "driftlab/field_io.hpp"
#include "driftlab/norms.hpp"
#include "driftlab/potentials.hpp"
#include "driftlab/report.hpp"
#include "driftlab/solver.hpp"
#include "driftlab/truncation.hpp"
#include "driftlab/zhikov.hpp"

namespace driftlab {

using nlohmann::json;

namespace {

const std::string kSchedule = "1,2,4,8,16,32,64,128,256,512,1024";

const std::map<std::string, std::vector<ConfigKey>>& schemas() {
  static const std::map<std::string, std::vector<ConfigKey>> s = {
      {"solve",
       {{"domain", {}, "unit_square, unit_disk, unit_cube or unit_ball"},
        {"resolution", {}, "cells per axis"},
        {"radial_grading", "1", "radial grading of round meshes"},
        {"drift", "none", "skew spec or random:<amplitude>"},
        {"drift_vector", "", "solenoidal vector spec converted to a skew potential"},
        {"f_density", "0", "scalar spec or number"},
        {"f_flux", "", "vector spec F in f = g + div F"},
        {"schedule", kSchedule, "truncation levels"},
        {"rtol", "1e-10", "Krylov relative tolerance"},
        {"stop_rtol", "1e-8", "schedule stop rule"},
        {"restart", "80", "GMRES restart length"},
        {"max_iterations", "4000", "GMRES iteration cap"},
        {"exact", "", "scalar spec of the exact solution for error reporting"}}},
      {"norms",
       {{"domain", {}, "model domain"},
        {"resolution", {}, "cells per axis of the finest level"},
        {"radial_grading", "1", "radial grading of round meshes"},
        {"field", "", "scalar spec"},
        {"drift", "", "skew spec (Frobenius magnitude)"},
        {"drift_vector", "", "vector spec (Euclidean magnitude)"},
        {"levels", "2", "refinement levels, each halving the resolution"},
        {"p_max", "64", "largest p of the growth samples"},
        {"bmo", "true", "include the BMO estimate"},
        {"diverge", "1.5", "growth factor read as divergence"},
        {"stable", "1.15", "growth factor read as boundedness"}}},
      {"potential",
       {{"domain", {}, "model domain"},
        {"resolution", {}, "cells per axis"},
        {"radial_grading", "1", "radial grading of round meshes"},
        {"construction", {}, "stream, poincare or newtonian"},
        {"field", "", "vector spec"},
        {"field_file", "", "cell vector CSV on the same mesh"},
        {"test_count", "200", "hat test functions of the residual"},
        {"nodes", "64", "line quadrature nodes of the Poincare construction"}}},
      {"truncate",
       {{"domain", {}, "model domain"},
        {"resolution", {}, "cells per axis"},
        {"radial_grading", "1", "radial grading of round meshes"},
        {"field", {}, "scalar spec sampled at vertices, zeroed on the boundary"},
        {"lambdas", {}, "truncation levels"},
        {"C", "1", "Lipschitz factor"}}},
      {"caccioppoli",
       {{"domain", {}, "model domain"},
        {"resolution", {}, "cells per axis"},
        {"radial_grading", "1", "radial grading of round meshes"},
        {"drift", "none", "bounded skew spec or random:<amplitude>"},
        {"field", "", "scalar spec for u, zeroed on the boundary"},
        {"f_density", "", "solve for u with this density instead"},
        {"lambdas", {}, "increasing truncation levels"},
        {"C", "1", "Lipschitz factor"},
        {"rtol", "1e-10", "Krylov relative tolerance"}}},
      {"zhikov",
       {{"resolution", "48", "ball mesh resolution"},
        {"rho", "0.05", "excision radius"},
        {"approximation_resolution", "24", "mesh of the approximation solution"},
        {"schedule", kSchedule, "truncation levels"},
        {"trend_levels", "3", "coarser levels of the refinement trend"},
        {"radial_grading", "2", "radial grading of the ball mesh"},
        {"rtol", "1e-10", "Krylov relative tolerance"}}},
  };
  return s;
}

class Reader {
public:
  explicit Reader(const Config& c) : c_(c) {}

  const std::string& str(const std::string& key) const { return c_.at(key); }
  bool has(const std::string& key) const { return !c_.at(key).empty(); }

  double real(const std::string& key) const { return parse_real(key, str(key)); }

  double positive(const std::string& key) const {
    const double v = real(key);
    if (!(v > 0.0)) bad(key, "must be positive");
    return v;
  }

  int integer(const std::string& key, int min) const {
    const std::string& s = str(key);
    int v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) bad(key, "must be an integer");
    if (v < min) bad(key, "must be >= " + std::to_string(min));
    return v;
  }

  bool boolean(const std::string& key) const {
    const std::string& s = str(key);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    bad(key, "must be true or false");
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::string item;
    const std::string& s = str(key);
    std::size_t pos = 0;
    while (pos <= s.size()) {
      const std::size_t end = std::min(s.find(',', pos), s.size());
      item = s.substr(pos, end - pos);
      const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
      if (b == std::string::npos) bad(key, "has an empty list entry");
      out.push_back(parse_real(key, item.substr(b, e - b + 1)));
      pos = end + 1;
    }
    return out;
  }

  Domain domain(const std::string& key = "domain") const {
    try {
      return Domain::parse(str(key));
    } catch (const ValidationError& e) {
      bad(key, e.what());
    }
  }

  /// A bare number n means const:n.
  std::string scalar_spec(const std::string& key) const {
    const std::string& s = str(key);
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec == std::errc() && r.ptr == s.data() + s.size()) return "const:" + s;
    return s;
  }

  [[noreturn]] static void bad(const std::string& key, const std::string& what) {
    fail_validation("config key '" + key + "': " + what);
  }

private:
  static double parse_real(const std::string& key, const std::string& s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
      bad(key, "'" + s + "' is not a finite number");
    return v;
  }

  const Config& c_;
};

template <typename F>
auto keyed(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    Reader::bad(key, e.what());
  }
}

MeshPtr mesh_from(const Reader& r, int min_resolution = 2) {
  MeshOptions opts;
  opts.radial_grading = r.real("radial_grading");
  if (opts.radial_grading < 1.0) Reader::bad("radial_grading", "must be >= 1");
  return build_mesh(r.domain(), r.integer("resolution", min_resolution), opts);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string line(const char* format, double v) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

SkewField skew_from(const Reader& r, const MeshPtr& mesh, const std::string& key,
                    std::uint64_t seed) {
  const std::string& spec = r.str(key);
  if (spec.rfind("random:", 0) == 0) {
    const double amp = keyed(key, [&] {
      const std::string a = spec.substr(7);
      double v = 0.0;
      const auto res = std::from_chars(a.data(), a.data() + a.size(), v);
      if (res.ec != std::errc() || res.ptr != a.data() + a.size() || !(v > 0.0))
        fail_validation("random drift amplitude must be a positive number");
      return v;
    });
    return random_skew(mesh, seed, amp);
  }
  return keyed(key, [&] { return sample_skew(mesh, spec); });
}

SkewField potential_of(const VectorField& a, const std::string& construction) {
  if (construction == "stream") return stream_potential_2d(a);
  if (construction == "poincare") return poincare_potential_ball(a);
  if (construction == "newtonian") return newtonian_potential(a);
  Reader::bad("construction", "expected stream, poincare or newtonian");
}

ScalarField vertex_field_zero_boundary(const Reader& r, const MeshPtr& mesh, const std::string& key) {
  auto u = keyed(key, [&] { return sample_scalar(mesh, r.scalar_spec(key), Sampling::Vertex); });
  for (std::size_t v = 0; v < u.size(); ++v) {
    if (mesh->on_boundary(v)) u[v] = 0.0;
    if (!std::isfinite(u[v])) Reader::bad(key, "field is not finite at every vertex");
  }
  return u;
}

json run_solve(const Reader& r, const std::string& out, std::uint64_t seed, std::string& summary) {
  const auto mesh = mesh_from(r);
  if (r.str("drift") != "none" && r.has("drift_vector"))
    fail_validation("config keys 'drift' and 'drift_vector' are mutually exclusive");
  SkewField A;
  if (r.has("drift_vector")) {
    const auto a = keyed("drift_vector", [&] { return sample_vector(mesh, r.str("drift_vector")); });
    const std::string construction = mesh->dim() == 2 ? "stream" : "poincare";
    A = keyed("drift_vector", [&] { return potential_of(a, construction); });
  } else {
    A = skew_from(r, mesh, "drift", seed);
  }
  Functional f;
  f.density = keyed("f_density", [&] {
    return sample_scalar(mesh, r.scalar_spec("f_density"), Sampling::CellAverage);
  });
  if (r.has("f_flux")) f.flux = keyed("f_flux", [&] { return sample_vector(mesh, r.str("f_flux")); });

  SolverOptions opts;
  opts.krylov.rtol = r.positive("rtol");
  opts.stop_rtol = r.positive("stop_rtol");
  opts.krylov.restart = r.integer("restart", 1);
  opts.krylov.max_iterations = r.integer("max_iterations", 1);
  const auto schedule = r.list("schedule");
  const auto rep = keyed("schedule", [&] { return approximation_solution(mesh, A, f, schedule, opts); });

  json j = to_json(rep);
  j["h"] = mesh->h();
  j["vertices"] = mesh->num_vertices();
  j["cells"] = mesh->num_cells();
  j["h1_seminorm"] = json_number(h1_seminorm(rep.u));
  summary += line("h1 seminorm      %.6g\n", h1_seminorm(rep.u));
  summary += line("energy defect    %.3e\n", rep.energy_defect);
  if (r.has("exact")) {
    const auto exact = keyed("exact", [&] {
      return sample_scalar(mesh, r.scalar_spec("exact"), Sampling::Vertex);
    });
    const double l2 = l2_norm(rep.u - exact), h1 = h1_seminorm(rep.u - exact);
    j["l2_error"] = json_number(l2);
    j["h1_error"] = json_number(h1);
    summary += line("L2 error         %.3e\n", l2);
    summary += line("H1 error         %.3e\n", h1);
  }
  summary += std::string("converged        ") + (rep.converged ? "yes" : "no") + "\n";
  write_mesh_csv(*mesh, out + "/mesh");
  write_field_csv(rep.u, out + "/u.csv");
  return j;
}

json run_norms(const Reader& r, std::string& summary) {
  const int given = r.has("field") + r.has("drift") + r.has("drift_vector");
  if (given != 1) fail_validation("exactly one of 'field', 'drift' and 'drift_vector' is required");
  const int levels = r.integer("levels", 2);
  const int res = r.integer("resolution", 2);
  if ((res >> (levels - 1)) < 2)
    Reader::bad("levels", "coarsest level would have fewer than 2 cells per axis");
  MeshOptions mopts;
  mopts.radial_grading = r.real("radial_grading");
  if (mopts.radial_grading < 1.0) Reader::bad("radial_grading", "must be >= 1");
  const Domain domain = r.domain();
  std::vector<ScalarField> ladder;
  for (int k = levels - 1; k >= 0; --k) {
    const auto mesh = build_mesh(domain, res >> k, mopts);
    if (r.has("field"))
      ladder.push_back(keyed("field", [&] {
        return sample_scalar(mesh, r.scalar_spec("field"), Sampling::CellAverage);
      }));
    else if (r.has("drift"))
      ladder.push_back(keyed("drift", [&] { return magnitude(sample_skew(mesh, r.str("drift"))); }));
    else
      ladder.push_back(keyed("drift_vector", [&] {
        return magnitude(sample_vector(mesh, r.str("drift_vector")));
      }));
  }
  ClassifyOptions copts;
  copts.p_max = r.real("p_max");
  if (copts.p_max < 8.0) Reader::bad("p_max", "must be >= 8");
  copts.with_bmo = r.boolean("bmo");
  copts.rule.diverge = r.real("diverge");
  copts.rule.stable = r.real("stable");
  if (!(copts.rule.stable >= 1.0 && copts.rule.diverge > copts.rule.stable))
    fail_validation("config keys 'stable' and 'diverge' need 1 <= stable < diverge");
  const auto rep = classify_drift(ladder, copts);
  summary += norms_table(rep);
  return to_json(rep);
}

json run_potential(const Reader& r, const std::string& out, std::uint64_t seed, std::string& summary) {
  const auto mesh = mesh_from(r);
  if (r.has("field") == r.has("field_file"))
    fail_validation("exactly one of 'field' and 'field_file' is required");
  const VectorField a =
      r.has("field") ? keyed("field", [&] { return sample_vector(mesh, r.str("field")); })
                     : std::get<VectorField>(read_field_csv(r.str("field_file"), mesh, "vector"));
  const std::string construction = r.str("construction");
  const int nodes = r.integer("nodes", 32);
  const SkewField A = construction == "poincare" ? poincare_potential_ball(a, nodes)
                                                 : potential_of(a, construction);
  const int tests = r.integer("test_count", 1);
  const double residual = weak_div_residual(A, a, tests, seed);
  json j = {{"construction", construction},
            {"h", mesh->h()},
            {"weak_div_residual", json_number(residual)},
            {"solenoidality_residual", json_number(solenoidality_residual(a))},
            {"field_l2", json_number(l2_norm(a))},
            {"potential_l2", json_number(l2_norm(A))}};
  summary += line("weak div residual  %.3e\n", residual);
  write_mesh_csv(*mesh, out + "/mesh");
  write_field_csv(A, out + "/A.csv");
  return j;
}

json run_truncate(const Reader& r, const std::string& out, std::string& summary) {
  const auto mesh = mesh_from(r);
  const auto u = vertex_field_zero_boundary(r, mesh, "field");
  const auto lambdas = r.list("lambdas");
  const double C = r.positive("C");
  for (double l : lambdas)
    if (!(l > 0.0)) Reader::bad("lambdas", "every lambda must be positive");
  const auto g = maximal_function(magnitude(gradient(u)));
  std::string table = "lambda,good_fraction,pruned,lipschitz_bound,lipschitz_quotient,h1_distance\n";
  json rows = json::array();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const auto tr = lipschitz_truncation(u, g, lambdas[i], C);
    std::size_t good = 0;
    for (auto b : tr.in_good_set) good += b;
    const double fraction = static_cast<double>(good) / mesh->num_vertices();
    const double quotient = pairwise_lipschitz(tr.u_lambda);
    const double dist = h1_seminorm(tr.u_lambda - u);
    rows.push_back({{"lambda", lambdas[i]},
                    {"good_fraction", fraction},
                    {"pruned", tr.pruned},
                    {"lipschitz_bound", tr.lipschitz_bound},
                    {"lipschitz_quotient", json_number(quotient)},
                    {"h1_distance", json_number(dist)}});
    table += fmt(lambdas[i]) + "," + fmt(fraction) + "," + std::to_string(tr.pruned) + "," +
             fmt(tr.lipschitz_bound) + "," + fmt(quotient) + "," + fmt(dist) + "\n";
    write_field_csv(tr.u_lambda, out + "/u_lambda_" + std::to_string(i) + ".csv");
    char buf[160];
    std::snprintf(buf, sizeof buf, "lambda %-10.4g good %.3f  quotient %.4g <= %.4g  |grad(u_l - u)| %.3e\n",
                  lambdas[i], fraction, quotient, tr.lipschitz_bound, dist);
    summary += buf;
  }
  write_mesh_csv(*mesh, out + "/mesh");
  write_field_csv(u, out + "/u.csv");
  write_field_csv(g, out + "/g.csv");
  write_text(out + "/table.csv", table);
  return {{"C", C}, {"h", mesh->h()}, {"rows", rows}};
}

json run_caccioppoli(const Reader& r, const std::string& out, std::uint64_t seed,
                     std::string& summary) {
  const auto mesh = mesh_from(r);
  if (r.has("field") == r.has("f_density"))
    fail_validation("exactly one of 'field' and 'f_density' is required");
  const SkewField A = skew_from(r, mesh, "drift", seed);
  ScalarField u;
  if (r.has("field")) {
    u = vertex_field_zero_boundary(r, mesh, "field");
  } else {
    Functional f;
    f.density = keyed("f_density", [&] {
      return sample_scalar(mesh, r.scalar_spec("f_density"), Sampling::CellAverage);
    });
    SolverOptions opts;
    opts.krylov.rtol = r.positive("rtol");
    u = solve_truncated(mesh, A, std::numeric_limits<double>::infinity(), f, opts);
  }
  const auto table = keyed("lambdas", [&] {
    return caccioppoli_replay(u, A, r.list("lambdas"), r.positive("C"));
  });
  std::string rows = "lambda,lhs,lhs_core,interaction,identity_defect,rhs,rhs_effective,holds\n";
  for (const auto& row : table.rows) {
    rows += fmt(row.lambda) + "," + fmt(row.lhs) + "," + fmt(row.lhs_core) + "," +
            fmt(row.interaction) + "," + fmt(row.identity_defect) + "," + fmt(row.rhs) + "," +
            fmt(row.rhs_effective) + "," + (row.holds ? "1" : "0") + "\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "lambda %-10.4g lhs %.4e  rhs %.4e  holds %s\n", row.lambda,
                  row.lhs, row.rhs, row.holds ? "yes" : "no");
    summary += buf;
  }
  std::string weighted = "epsilon,lhs,rhs\n";
  for (const auto& w : table.weighted) weighted += fmt(w[0]) + "," + fmt(w[1]) + "," + fmt(w[2]) + "\n";
  write_mesh_csv(*mesh, out + "/mesh");
  write_field_csv(u, out + "/u.csv");
  write_text(out + "/table.csv", rows);
  write_text(out + "/weighted.csv", weighted);
  json j = to_json(table);
  j["h"] = mesh->h();
  return j;
}

json run_zhikov(const Reader& r, std::string& summary) {
  ZhikovOptions opts;
  opts.resolution = r.integer("resolution", 4);
  opts.rho = r.real("rho");
  if (!(opts.rho > 0.0 && opts.rho <= 0.1)) Reader::bad("rho", "must lie in (0, 0.1]");
  opts.approximation_resolution = r.integer("approximation_resolution", 4);
  opts.schedule = r.list("schedule");
  opts.trend_levels = r.integer("trend_levels", 0);
  opts.radial_grading = r.real("radial_grading");
  if (opts.radial_grading < 1.0) Reader::bad("radial_grading", "must be >= 1");
  opts.rtol = r.positive("rtol");
  const auto rep = nonuniqueness_report(opts);
  summary += line("bracket [u,u]              %.5f\n", rep.main.bracket);
  summary += line("approximation defect       %.3e\n", rep.approximation.energy_defect);
  summary += rep.verdict + "\n";
  return to_json(rep);
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : schemas()) n.push_back(k);
    return n;
  }();
  return names;
}

const std::vector<ConfigKey>& experiment_keys(const std::string& name) {
  const auto it = schemas().find(name);
  if (it == schemas().end())
    fail_validation("unknown subcommand '" + name +
                    "' (expected solve, norms, potential, truncate, caccioppoli or zhikov)");
  return it->second;
}

Config resolve_config(const std::string& name, const Config& config) {
  const auto& keys = experiment_keys(name);
  std::string unknown, missing;
  for (const auto& [k, v] : config) {
    bool known = false;
    for (const auto& key : keys) known |= key.name == k;
    if (!known) unknown += (unknown.empty() ? "" : ", ") + k;
  }
  if (!unknown.empty()) fail_validation("unknown config keys for '" + name + "': " + unknown);
  Config resolved;
  for (const auto& key : keys) {
    if (auto it = config.find(key.name); it != config.end()) resolved[key.name] = it->second;
    else if (key.fallback) resolved[key.name] = *key.fallback;
    else missing += (missing.empty() ? "" : ", ") + key.name;
  }
  if (!missing.empty()) fail_validation("missing required config keys for '" + name + "': " + missing);
  return resolved;
}

ExperimentOutput run_experiment(const std::string& name, const Config& config,
                                const std::string& out_dir, std::uint64_t seed) {
  const Config resolved = resolve_config(name, config);
  require(!out_dir.empty(), "output directory must not be empty");
  try {
    std::filesystem::create_directories(out_dir);
  } catch (const std::filesystem::filesystem_error& e) {
    throw IoError(std::string("cannot create output directory: ") + e.what());
  }
  const Reader r(resolved);
  ExperimentOutput result;
  json report;
  if (name == "solve") report = run_solve(r, out_dir, seed, result.summary);
  else if (name == "norms") report = run_norms(r, result.summary);
  else if (name == "potential") report = run_potential(r, out_dir, seed, result.summary);
  else if (name == "truncate") report = run_truncate(r, out_dir, result.summary);
  else if (name == "caccioppoli") report = run_caccioppoli(r, out_dir, seed, result.summary);
  else report = run_zhikov(r, result.summary);

  result.document = {{"schema", kReportSchema},
                     {"subcommand", name},
                     {"config", resolved},
                     {"seed", seed},
                     {"report", report}};
  write_text(out_dir + "/report.json", dump_json(result.document));
  if (name == "solve" && !report.at("converged").get<bool>())
    throw NumericalError("truncation schedule ended before the stop rule was met; report written");
  return result;
}

}  // namespace driftlab
