#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace driftlab {

/// Points always carry three coordinates; z is zero on planar meshes.
using Point = std::array<double, 3>;

inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Point cross(const Point& a, const Point& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm(const Point& a);

enum class DomainKind { UnitSquare, UnitDisk, UnitCube, UnitBall };

/// One of the model domains. Square and cube are [0,1]^n; disk and ball
/// are centred at the origin with radius 1.
struct Domain {
  DomainKind kind = DomainKind::UnitSquare;

  int dimension() const;
  std::string name() const;
  static Domain parse(std::string_view name);

  /// Exact Lebesgue measure of the continuous domain.
  double measure() const;
  double diameter() const;
  /// Reference point used by analytic fields (origin or cube centre).
  Point center() const;
  Point box_lo() const;
  Point box_hi() const;
  bool contains(const Point& x, double tol = 1e-12) const;
  bool is_round() const { return kind == DomainKind::UnitDisk || kind == DomainKind::UnitBall; }
};

struct MeshOptions {
  /// Radial grading exponent for disk/ball meshes: cells shrink like
  /// r^grading towards the origin. 1 gives the plain mapped grid.
  double radial_grading = 1.0;
};

/// Geometry of one simplex, computed on demand.
struct CellGeometry {
  double volume = 0.0;
  Point centroid{};
  /// Gradients of the barycentric (hat) functions of the cell's vertices.
  std::array<Point, 4> grad{};
};

/// Conforming simplicial mesh of a model domain. Immutable once built.
class Mesh {
public:
  Mesh(Domain domain, std::vector<Point> vertices, std::vector<std::int32_t> cells,
       std::vector<std::uint8_t> boundary, int resolution, MeshOptions options);

  const Domain& domain() const { return domain_; }
  int dim() const { return dim_; }
  int vertices_per_cell() const { return dim_ + 1; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return volumes_.size(); }
  int resolution() const { return resolution_; }
  const MeshOptions& options() const { return options_; }

  const Point& vertex(std::size_t v) const { return vertices_[v]; }
  std::span<const Point> vertices() const { return vertices_; }
  std::span<const std::int32_t> cell(std::size_t k) const {
    return {cells_.data() + k * vertices_per_cell(), static_cast<std::size_t>(vertices_per_cell())};
  }
  std::span<const std::int32_t> cell_table() const { return cells_; }
  bool on_boundary(std::size_t v) const { return boundary_[v] != 0; }
  std::span<const std::uint8_t> boundary_flags() const { return boundary_; }

  double volume(std::size_t k) const { return volumes_[k]; }
  Point centroid(std::size_t k) const;
  CellGeometry geometry(std::size_t k) const;
  /// Largest edge length of cell k.
  double cell_diameter(std::size_t k) const;

  /// Mesh size: maximum cell diameter.
  double h() const { return h_; }
  double total_volume() const { return total_volume_; }

  /// Lumped vertex measure: sum of |K|/(n+1) over incident cells.
  const std::vector<double>& vertex_measure() const;
  /// Cells incident to each vertex (CSR offsets and indices).
  struct Incidence {
    std::vector<std::size_t> offsets;
    std::vector<std::int32_t> cells;
    std::span<const std::int32_t> of(std::size_t v) const {
      return {cells.data() + offsets[v], offsets[v + 1] - offsets[v]};
    }
  };
  const Incidence& incidence() const;

  /// Maps barycentric coordinates of cell k to physical coordinates.
  Point map(std::size_t k, const std::array<double, 4>& bary) const;

private:
  Domain domain_;
  int dim_ = 2;
  int resolution_ = 0;
  MeshOptions options_;
  std::vector<Point> vertices_;
  std::vector<std::int32_t> cells_;
  std::vector<std::uint8_t> boundary_;
  std::vector<double> volumes_;
  double h_ = 0.0;
  double total_volume_ = 0.0;

  mutable std::once_flag measure_once_;
  mutable std::vector<double> vertex_measure_;
  mutable std::once_flag incidence_once_;
  mutable Incidence incidence_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Structured simplicial mesh with `resolution` cells per axis. Square and
/// cube use the Kuhn split of [0,1]^n; disk and ball use a reflected Kuhn
/// split of [-1,1]^n mapped radially onto the round domain, with boundary
/// vertices placed exactly on the unit sphere.
MeshPtr build_mesh(const Domain& domain, int resolution, MeshOptions options = {});

}  // namespace driftlab
