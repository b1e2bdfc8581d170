#pragma once

#include <functional>
#include <span>
#include <vector>

#include "driftlab/mesh.hpp"

namespace driftlab {

/// Binary space partition of the cells of a mesh, split at the median
/// centroid along the longest box axis.
class CellTree {
public:
  struct Node {
    Point lo{}, hi{};  // bounding box of the cells' vertices
    std::int32_t left = -1, right = -1;
    std::uint32_t begin = 0, end = 0;  // range in order()
    double size = 0.0;                 // box diagonal
  };

  /// Per-node aggregates of integral data for one cellwise density.
  struct Weights {
    std::vector<double> cell_mass;  // |K| * value_K
    std::vector<double> node_mass;
    std::vector<double> node_abs_mass;
    std::vector<Point> node_center;  // volume-weighted centroid
  };

  explicit CellTree(MeshPtr mesh, std::size_t leaf_size = 8);

  const Mesh& mesh() const { return *mesh_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::span<const std::int32_t> order() const { return order_; }
  double cell_radius(std::size_t k) const { return radius_[k]; }
  const Point& cell_centroid(std::size_t k) const { return centroid_[k]; }

  Weights aggregate(std::span<const double> cell_values) const;

  /// Integral of the density over the ball B_R(x) (cells outside the mesh
  /// contribute nothing). Cells cut by the sphere are resolved with sub-cell
  /// points; nodes smaller than eps*R that straddle the sphere are counted
  /// whole or not at all by their centre. With `fractional` false, cut cells
  /// are also counted by their centroid.
  double ball_integral(const Weights& w, const Point& x, double R, double eps = 1.0 / 32,
                       bool fractional = true) const;

  /// Volume of B_R(x) intersected with the mesh, same rules.
  double ball_volume(const Point& x, double R, double eps = 1.0 / 32) const;

  /// Sum over cells of mass_K * kernel, with far nodes (size < theta*dist)
  /// replaced by their aggregate at the node centre. `near(k)` integrates
  /// cell k exactly when the centroid is closer than near_factor * radius.
  double kernel_sum(const Weights& w, const Point& x, const std::function<double(double)>& kernel,
                    double theta, double near_factor,
                    const std::function<double(std::size_t)>& near) const;

private:
  MeshPtr mesh_;
  std::vector<Node> nodes_;
  std::vector<std::int32_t> order_;
  std::vector<Point> centroid_;
  std::vector<double> radius_;
  std::vector<double> node_volume_;
  std::vector<Point> node_vcenter_;
  double max_radius_ = 0.0;

  std::int32_t build(std::uint32_t begin, std::uint32_t end, std::size_t leaf_size);
  double cell_fraction_in_ball(std::size_t k, const Point& x, double R) const;
};

using SimplexCorners = std::array<Point, 4>;

/// int_K |y - x|^-power dy by a 27-point (9 in 2-D) collapsed rule after `levels` uniform
/// midpoint subdivisions.
double regular_simplex_integral(const SimplexCorners& s, int dim, const Point& x, double power,
                                int levels);
/// int_K |y - s[0]|^-power dy for power < dim.
double singular_simplex_integral(const SimplexCorners& s, int dim, double power);

/// Finds the cell containing a point via a uniform bucket grid; falls back
/// to the cell with the nearest centroid for points just outside.
class PointLocator {
public:
  explicit PointLocator(MeshPtr mesh);
  std::size_t locate(const Point& x) const;

private:
  MeshPtr mesh_;
  Point lo_{}, cell_size_{};
  std::array<int, 3> dims_{1, 1, 1};
  std::vector<std::size_t> offsets_;
  std::vector<std::int32_t> cells_;
  std::vector<Point> centroid_;

  bool inside(std::size_t k, const Point& x, double tol) const;
  std::size_t bucket_of(const Point& x) const;
};

}  // namespace driftlab
