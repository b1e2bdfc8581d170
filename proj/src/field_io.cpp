#include "driftlab/field_io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "driftlab/error.hpp"

namespace driftlab {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::vector<std::vector<double>> read_rows(const std::string& path, std::string& header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::getline(in, header);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t end = std::min(line.find(',', pos), line.size());
      double v = 0.0;
      const auto res = std::from_chars(line.data() + pos, line.data() + end, v);
      if (res.ec != std::errc() || res.ptr != line.data() + end)
        throw IoError(path + ":" + std::to_string(lineno) + ": malformed number");
      row.push_back(v);
      pos = end + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void check_index(const std::vector<double>& row, std::size_t expected, const std::string& path) {
  if (row.empty() || row[0] != static_cast<double>(expected))
    throw IoError(path + ": rows must be numbered consecutively from 0");
}

std::pair<std::size_t, std::vector<double>> flatten(const AnyField& f) {
  return std::visit(
      [](const auto& x) -> std::pair<std::size_t, std::vector<double>> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ScalarField>) return {1, x.values()};
        else if constexpr (std::is_same_v<T, VectorField>)
          return {static_cast<std::size_t>(x.dim()), x.values()};
        else return {static_cast<std::size_t>(x.entries_per_cell()), x.values()};
      },
      f);
}

const MeshPtr& mesh_of(const AnyField& f) {
  return std::visit([](const auto& x) -> const MeshPtr& { return x.mesh(); }, f);
}

bool is_vertex(const AnyField& f) {
  return std::holds_alternative<ScalarField>(f) &&
         std::get<ScalarField>(f).layout() == Layout::Vertex;
}

AnyField make_field(const MeshPtr& mesh, const std::string& kind, bool vertex,
                    std::vector<double> values) {
  if (kind == "scalar")
    return ScalarField(mesh, vertex ? Layout::Vertex : Layout::Cell, std::move(values));
  require(!vertex, kind + " fields are stored per cell");
  if (kind == "vector") return VectorField(mesh, std::move(values));
  if (kind == "skew") return SkewField(mesh, std::move(values));
  fail_validation("unknown field kind '" + kind + "' (expected scalar, vector or skew)");
}

}  // namespace

const char* field_kind(const AnyField& field) {
  switch (field.index()) {
    case 0: return "scalar";
    case 1: return "vector";
    default: return "skew";
  }
}

void write_mesh_csv(const Mesh& mesh, const std::string& directory) {
  std::filesystem::create_directories(directory);
  const int dim = mesh.dim();
  {
    auto out = open_out(directory + "/vertices.csv");
    out << "index,x,y" << (dim == 3 ? ",z" : "") << ",boundary\n";
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
      out << v;
      for (int d = 0; d < dim; ++d) out << ',' << fmt(mesh.vertex(v)[d]);
      out << ',' << (mesh.on_boundary(v) ? 1 : 0) << '\n';
    }
  }
  auto out = open_out(directory + "/cells.csv");
  out << "index";
  for (int i = 0; i <= dim; ++i) out << ",v" << i;
  out << '\n';
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    out << k;
    for (auto v : mesh.cell(k)) out << ',' << v;
    out << '\n';
  }
}

MeshPtr read_mesh_csv(const std::string& directory, const Domain& domain, int resolution) {
  const int dim = domain.dimension();
  std::string header;
  const auto vrows = read_rows(directory + "/vertices.csv", header);
  const auto crows = read_rows(directory + "/cells.csv", header);
  std::vector<Point> vertices;
  std::vector<std::uint8_t> boundary;
  for (std::size_t i = 0; i < vrows.size(); ++i) {
    const auto& r = vrows[i];
    check_index(r, i, "vertices.csv");
    if (r.size() != static_cast<std::size_t>(dim + 2)) throw IoError("vertices.csv: wrong column count");
    Point p{};
    for (int d = 0; d < dim; ++d) p[d] = r[1 + d];
    vertices.push_back(p);
    boundary.push_back(r[dim + 1] != 0.0);
  }
  std::vector<std::int32_t> cells;
  for (std::size_t i = 0; i < crows.size(); ++i) {
    const auto& r = crows[i];
    check_index(r, i, "cells.csv");
    if (r.size() != static_cast<std::size_t>(dim + 2)) throw IoError("cells.csv: wrong column count");
    for (int j = 1; j <= dim + 1; ++j) cells.push_back(static_cast<std::int32_t>(r[j]));
  }
  return std::make_shared<const Mesh>(domain, std::move(vertices), std::move(cells),
                                      std::move(boundary), resolution, MeshOptions{});
}

void write_field_csv(const AnyField& field, const std::string& path) {
  const auto [width, values] = flatten(field);
  auto out = open_out(path);
  out << (is_vertex(field) ? "vertex" : "cell");
  for (std::size_t c = 0; c < width; ++c) out << ",c" << c;
  out << '\n';
  for (std::size_t i = 0; i < values.size() / width; ++i) {
    out << i;
    for (std::size_t c = 0; c < width; ++c) out << ',' << fmt(values[i * width + c]);
    out << '\n';
  }
}

AnyField read_field_csv(const std::string& path, const MeshPtr& mesh, const std::string& kind) {
  std::string header;
  const auto rows = read_rows(path, header);
  const std::string layout = header.substr(0, header.find(','));
  if (layout != "vertex" && layout != "cell")
    throw IoError(path + ": header must start with 'vertex' or 'cell'");
  std::vector<double> values;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    check_index(rows[i], i, path);
    values.insert(values.end(), rows[i].begin() + 1, rows[i].end());
  }
  return make_field(mesh, kind, layout == "vertex", std::move(values));
}

void write_json_container(const FieldBundle& bundle, const std::string& path) {
  require(bundle.mesh != nullptr, "container needs a mesh");
  const Mesh& m = *bundle.mesh;
  json j;
  j["schema"] = "driftlab-fields/1";
  j["domain"] = m.domain().name();
  j["resolution"] = m.resolution();
  j["radial_grading"] = m.options().radial_grading;
  json verts = json::array();
  for (const auto& p : m.vertices()) {
    json row = json::array();
    for (int d = 0; d < m.dim(); ++d) row.push_back(p[d]);
    verts.push_back(row);
  }
  j["vertices"] = verts;
  j["cells"] = std::vector<std::int32_t>(m.cell_table().begin(), m.cell_table().end());
  j["boundary"] = std::vector<int>(m.boundary_flags().begin(), m.boundary_flags().end());
  json fields = json::object();
  for (const auto& [name, f] : bundle.fields) {
    require_same_mesh(bundle.mesh, mesh_of(f));
    fields[name] = {{"kind", field_kind(f)},
                    {"layout", is_vertex(f) ? "vertex" : "cell"},
                    {"values", flatten(f).second}};
  }
  j["fields"] = fields;
  auto out = open_out(path);
  out << j.dump() << '\n';
}

FieldBundle read_json_container(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
    if (j.at("schema") != "driftlab-fields/1") throw IoError(path + ": unsupported schema");
    const Domain domain = Domain::parse(j.at("domain").get<std::string>());
    std::vector<Point> vertices;
    for (const auto& row : j.at("vertices")) {
      if (row.size() != static_cast<std::size_t>(domain.dimension()))
        throw IoError(path + ": vertex dimension mismatch");
      Point p{};
      for (std::size_t d = 0; d < row.size(); ++d) p[d] = row[d].get<double>();
      vertices.push_back(p);
    }
    auto cells = j.at("cells").get<std::vector<std::int32_t>>();
    std::vector<std::uint8_t> boundary;
    for (int b : j.at("boundary").get<std::vector<int>>()) boundary.push_back(b != 0);
    MeshOptions opts;
    opts.radial_grading = j.value("radial_grading", 1.0);
    FieldBundle bundle;
    bundle.mesh = std::make_shared<const Mesh>(domain, std::move(vertices), std::move(cells),
                                               std::move(boundary), j.value("resolution", 0), opts);
    for (const auto& [name, f] : j.at("fields").items())
      bundle.fields.emplace(name, make_field(bundle.mesh, f.at("kind").get<std::string>(),
                                             f.at("layout") == "vertex",
                                             f.at("values").get<std::vector<double>>()));
    return bundle;
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace driftlab
