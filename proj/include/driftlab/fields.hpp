#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "driftlab/mesh.hpp"
#include "driftlab/quadrature.hpp"

namespace driftlab {

enum class Layout { Vertex, Cell };

/// Continuous P1 (vertex layout) or piecewise-constant (cell layout) scalar.
class ScalarField {
public:
  ScalarField() = default;
  ScalarField(MeshPtr mesh, Layout layout, std::vector<double> values);
  static ScalarField zeros(MeshPtr mesh, Layout layout);

  const MeshPtr& mesh() const { return mesh_; }
  Layout layout() const { return layout_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Mean over cell k (exact for both layouts).
  double cell_mean(std::size_t k) const;
  /// Value at barycentric point of cell k.
  double eval(std::size_t k, const std::array<double, 4>& bary) const;

private:
  MeshPtr mesh_;
  Layout layout_ = Layout::Vertex;
  std::vector<double> values_;
};

/// n reals per cell.
class VectorField {
public:
  VectorField() = default;
  VectorField(MeshPtr mesh, std::vector<double> values);
  static VectorField zeros(MeshPtr mesh);

  const MeshPtr& mesh() const { return mesh_; }
  int dim() const { return dim_; }
  std::size_t num_cells() const { return values_.size() / dim_; }
  Point at(std::size_t k) const;
  void set(std::size_t k, const Point& v);
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

private:
  MeshPtr mesh_;
  int dim_ = 2;
  std::vector<double> values_;
};

/// Cellwise skew-symmetric matrix stored by its strict upper triangle:
/// (A01) in 2-D and (A01, A02, A12) in 3-D.
class SkewField {
public:
  SkewField() = default;
  SkewField(MeshPtr mesh, std::vector<double> values);
  static SkewField zeros(MeshPtr mesh);
  /// 2-D field with the single entry alpha per cell.
  static SkewField from_scalar(const ScalarField& alpha);
  /// 3-D field with A xi = w x xi.
  static SkewField from_axial(const VectorField& w);

  const MeshPtr& mesh() const { return mesh_; }
  int dim() const { return dim_; }
  int entries_per_cell() const { return dim_ == 2 ? 1 : 3; }
  std::size_t num_cells() const { return mesh_ ? mesh_->num_cells() : 0; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  std::span<const double> entries(std::size_t k) const {
    return {values_.data() + k * entries_per_cell(), static_cast<std::size_t>(entries_per_cell())};
  }

  /// Full matrix of cell k; A + A^T = 0 exactly.
  std::array<std::array<double, 3>, 3> matrix(std::size_t k) const;
  /// A xi for cell k.
  Point apply(std::size_t k, const Point& xi) const;
  /// Frobenius norm of the matrix in cell k.
  double frobenius(std::size_t k) const;
  /// Largest absolute stored entry.
  double max_abs() const;

private:
  MeshPtr mesh_;
  int dim_ = 2;
  std::vector<double> values_;
};

/// f = g + div(F): density g and flux F, acting as
/// (f, phi) = int g phi - int F . grad phi.
struct Functional {
  std::optional<ScalarField> density;
  std::optional<VectorField> flux;

  const MeshPtr& mesh() const;
  /// (f, phi) for a vertex-layout test function.
  double apply(const ScalarField& phi) const;
  /// Load vector: entry v is (f, hat_v).
  std::vector<double> load_vector() const;
};

void require_same_mesh(const MeshPtr& a, const MeshPtr& b);

/// Cellwise gradient of a vertex-layout field.
VectorField gradient(const ScalarField& u);

/// Integral of a scalar field (exact for P1 and P0 data).
double integrate(const ScalarField& f);
/// Integral restricted to cells with mask[k] != 0.
double integrate(const ScalarField& f, std::span<const std::uint8_t> cell_mask);
/// Integral of the product of two scalar fields (exact for P1*P1).
double integrate_product(const ScalarField& a, const ScalarField& b);
/// Integral of a . b for cellwise vectors.
double integrate_dot(const VectorField& a, const VectorField& b);
/// Integral of a function of position with a simplex rule.
double integrate_function(const Mesh& mesh, const std::function<double(const Point&)>& f,
                          const SimplexRule& rule);
double integrate_function(const Mesh& mesh, const std::function<double(const Point&)>& f);

/// sqrt(int |grad u|^2).
double h1_seminorm(const ScalarField& u);
/// L2 norm of a scalar field (exact for P1 and P0 data).
double l2_norm(const ScalarField& f);
/// L2 norm of a cellwise vector field.
double l2_norm(const VectorField& a);
/// L2 norm of a skew field, using the Frobenius matrix norm.
double l2_norm(const SkewField& A);

/// Pointwise magnitude of a vector field as a cell-layout scalar.
ScalarField magnitude(const VectorField& a);
/// Pointwise Frobenius norm of a skew field as a cell-layout scalar.
ScalarField magnitude(const SkewField& A);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
SkewField operator+(const SkewField& a, const SkewField& b);
SkewField operator*(double s, const SkewField& a);
VectorField operator*(double s, const VectorField& a);

}  // namespace driftlab
