#pragma once

#include <map>
#include <string>
#include <variant>

#include "driftlab/fields.hpp"

namespace driftlab {

using AnyField = std::variant<ScalarField, VectorField, SkewField>;

/// vertices.csv (index, x, y[, z], boundary) and cells.csv (index, v0, ...).
void write_mesh_csv(const Mesh& mesh, const std::string& directory);
MeshPtr read_mesh_csv(const std::string& directory, const Domain& domain, int resolution = 0);

/// One row per entity: index followed by the stored values. The header names
/// the layout ("vertex" or "cell") and the columns.
void write_field_csv(const AnyField& field, const std::string& path);
/// kind is "scalar", "vector" or "skew"; the layout is read from the header.
AnyField read_field_csv(const std::string& path, const MeshPtr& mesh, const std::string& kind);

/// JSON container holding a mesh and named fields with layout metadata.
struct FieldBundle {
  MeshPtr mesh;
  std::map<std::string, AnyField> fields;
};
void write_json_container(const FieldBundle& bundle, const std::string& path);
FieldBundle read_json_container(const std::string& path);

const char* field_kind(const AnyField& field);

}  // namespace driftlab
