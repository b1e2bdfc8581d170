#include "driftlab/driftlab.h"

#include <cstring>
#include <limits>
#include <new>
#include <string>
#include <variant>

#include "driftlab/analytic.hpp"
#include "driftlab/error.hpp"
#include "driftlab/experiments.hpp"
#include "driftlab/field_io.hpp"
#include "driftlab/norms.hpp"
#include "driftlab/parallel.hpp"
#include "driftlab/report.hpp"
#include "driftlab/solver.hpp"
#include "driftlab/zhikov.hpp"

struct dl_mesh {
  driftlab::MeshPtr mesh;
};

struct dl_field {
  driftlab::AnyField field;
  dl_field_kind kind;
};

namespace {

using namespace driftlab;

thread_local std::string last_error;

template <typename F>
dl_status guard(F&& body) {
  last_error.clear();
  try {
    body();
    return DL_OK;
  } catch (const ValidationError& e) {
    last_error = e.what();
    return DL_ERR_VALIDATION;
  } catch (const NumericalError& e) {
    last_error = e.what();
    return DL_ERR_NUMERICAL;
  } catch (const IoError& e) {
    last_error = e.what();
    return DL_ERR_IO;
  } catch (const nlohmann::json::exception& e) {
    last_error = std::string("malformed JSON: ") + e.what();
    return DL_ERR_VALIDATION;
  } catch (const std::exception& e) {
    last_error = e.what();
    return DL_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return DL_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) fail_validation(std::string(what) + " is null");
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const ScalarField& scalar(const dl_field* f, const char* what) {
  need(f, what);
  if (const auto* s = std::get_if<ScalarField>(&f->field)) return *s;
  fail_validation(std::string(what) + " must be a scalar field");
}

const SkewField& skew(const dl_field* f, const char* what) {
  need(f, what);
  if (const auto* s = std::get_if<SkewField>(&f->field)) return *s;
  fail_validation(std::string(what) + " must be a skew field");
}

const ScalarField& vertex_scalar(const dl_field* f, const char* what) {
  const auto& s = scalar(f, what);
  require(s.layout() == Layout::Vertex, std::string(what) + " must be a vertex field");
  return s;
}

dl_field* wrap(AnyField field, dl_field_kind kind) { return new dl_field{std::move(field), kind}; }

}  // namespace

extern "C" {

const char* dl_version(void) { return "0.1.0"; }

const char* dl_last_error(void) { return last_error.c_str(); }

dl_status dl_set_threads(int n) {
  return guard([&] {
    require(n >= 1, "thread count must be >= 1");
    set_thread_count(n);
  });
}

dl_status dl_mesh_build(const char* domain, int resolution, double radial_grading, dl_mesh** out) {
  return guard([&] {
    need(domain, "domain");
    need(out, "out");
    require(resolution >= 1, "resolution must be >= 1");
    require(radial_grading >= 1.0, "radial_grading must be >= 1");
    MeshOptions opts;
    opts.radial_grading = radial_grading;
    auto mesh = build_mesh(Domain::parse(domain), resolution, opts);
    *out = new dl_mesh{std::move(mesh)};
  });
}

dl_status dl_mesh_info(const dl_mesh* mesh, int* dim, size_t* vertices, size_t* cells, double* h) {
  return guard([&] {
    need(mesh, "mesh");
    if (dim) *dim = mesh->mesh->dim();
    if (vertices) *vertices = mesh->mesh->num_vertices();
    if (cells) *cells = mesh->mesh->num_cells();
    if (h) *h = mesh->mesh->h();
  });
}

void dl_mesh_free(dl_mesh* mesh) { delete mesh; }

dl_status dl_field_sample(const dl_mesh* mesh, dl_field_kind kind, const char* spec, dl_field** out) {
  return guard([&] {
    need(mesh, "mesh");
    need(spec, "spec");
    need(out, "out");
    const auto& m = mesh->mesh;
    switch (kind) {
      case DL_FIELD_SCALAR_VERTEX:
        *out = wrap(sample_scalar(m, spec, Sampling::Vertex), kind);
        break;
      case DL_FIELD_SCALAR_CELL:
        *out = wrap(sample_scalar(m, spec, Sampling::CellAverage), kind);
        break;
      case DL_FIELD_VECTOR:
        *out = wrap(sample_vector(m, spec), kind);
        break;
      case DL_FIELD_SKEW:
        *out = wrap(sample_skew(m, spec), kind);
        break;
      default:
        fail_validation("unknown field kind");
    }
  });
}

dl_status dl_field_create(const dl_mesh* mesh, dl_field_kind kind, const double* values,
                          size_t count, dl_field** out) {
  return guard([&] {
    need(mesh, "mesh");
    need(out, "out");
    if (count > 0) need(values, "values");
    const auto& m = mesh->mesh;
    const int dim = m->dim();
    std::size_t expected = 0;
    switch (kind) {
      case DL_FIELD_SCALAR_VERTEX: expected = m->num_vertices(); break;
      case DL_FIELD_SCALAR_CELL: expected = m->num_cells(); break;
      case DL_FIELD_VECTOR: expected = m->num_cells() * dim; break;
      case DL_FIELD_SKEW: expected = m->num_cells() * (dim == 2 ? 1 : 3); break;
      default: fail_validation("unknown field kind");
    }
    require(count == expected, "expected " + std::to_string(expected) + " values, got " +
                                   std::to_string(count));
    std::vector<double> v(values, values + count);
    if (kind == DL_FIELD_SCALAR_VERTEX) *out = wrap(ScalarField(m, Layout::Vertex, std::move(v)), kind);
    else if (kind == DL_FIELD_SCALAR_CELL) *out = wrap(ScalarField(m, Layout::Cell, std::move(v)), kind);
    else if (kind == DL_FIELD_VECTOR) *out = wrap(VectorField(m, std::move(v)), kind);
    else *out = wrap(SkewField(m, std::move(v)), kind);
  });
}

dl_status dl_field_kind_of(const dl_field* field, dl_field_kind* kind) {
  return guard([&] {
    need(field, "field");
    need(kind, "kind");
    *kind = field->kind;
  });
}

dl_status dl_field_values(const dl_field* field, const double** values, size_t* count) {
  return guard([&] {
    need(field, "field");
    need(values, "values");
    need(count, "count");
    const auto& v = std::visit([](const auto& f) -> const std::vector<double>& { return f.values(); },
                               field->field);
    *values = v.data();
    *count = v.size();
  });
}

void dl_field_free(dl_field* field) { delete field; }

dl_status dl_h1_seminorm(const dl_field* u, double* out) {
  return guard([&] {
    need(out, "out");
    *out = h1_seminorm(vertex_scalar(u, "u"));
  });
}

dl_status dl_lp_norm(const dl_field* f, double p, double* out) {
  return guard([&] {
    need(out, "out");
    require(p >= 1.0, "p must be >= 1");
    *out = lp_norm(scalar(f, "f"), p);
  });
}

dl_status dl_bracket(const dl_field* u, const dl_field* v, const dl_field* A, double* out) {
  return guard([&] {
    need(out, "out");
    *out = bracket(vertex_scalar(u, "u"), vertex_scalar(v, "v"), skew(A, "A"));
  });
}

dl_status dl_solve(const dl_field* A, const dl_field* g, double rtol, dl_field** u_out) {
  return guard([&] {
    need(u_out, "u_out");
    require(rtol > 0.0, "rtol must be positive");
    const auto& a = skew(A, "A");
    Functional f;
    f.density = scalar(g, "g");
    SolverOptions opts;
    opts.krylov.rtol = rtol;
    auto u = solve_truncated(a.mesh(), a, std::numeric_limits<double>::infinity(), f, opts);
    *u_out = wrap(std::move(u), DL_FIELD_SCALAR_VERTEX);
  });
}

dl_status dl_energy_defect(const dl_field* u, const dl_field* g, double* out) {
  return guard([&] {
    need(out, "out");
    Functional f;
    f.density = scalar(g, "g");
    *out = energy_defect(vertex_scalar(u, "u"), f);
  });
}

dl_status dl_zhikov_bracket(const dl_mesh* mesh, double rho, double* out) {
  return guard([&] {
    need(mesh, "mesh");
    need(out, "out");
    static const SphericalPair pair = build_pair();
    *out = bracket_value(pair, mesh->mesh, rho);
  });
}

dl_status dl_run_experiment(const char* subcommand, const char* config_json, const char* out_dir,
                            uint64_t seed, char** report_json, char** summary) {
  return guard([&] {
    need(subcommand, "subcommand");
    need(out_dir, "out_dir");
    Config config;
    if (config_json != nullptr) {
      const auto j = nlohmann::json::parse(config_json);
      require(j.is_object(), "config must be a JSON object");
      for (const auto& [k, v] : j.items()) {
        require(v.is_string(), "config value of '" + k + "' must be a string");
        config[k] = v.get<std::string>();
      }
    }
    const auto result = run_experiment(subcommand, config, out_dir, seed);
    if (report_json) *report_json = copy_string(dump_json(result.document));
    if (summary) *summary = copy_string(result.summary);
  });
}

dl_status dl_experiment_keys(const char* subcommand, char** keys_json) {
  return guard([&] {
    need(subcommand, "subcommand");
    need(keys_json, "keys_json");
    nlohmann::json a = nlohmann::json::array();
    for (const auto& key : experiment_keys(subcommand))
      a.push_back({{"name", key.name},
                   {"default", key.fallback ? nlohmann::json(*key.fallback) : nlohmann::json()},
                   {"help", key.help}});
    *keys_json = copy_string(a.dump());
  });
}

void dl_string_free(char* s) { delete[] s; }

}  // extern "C"
