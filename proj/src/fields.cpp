#include "driftlab/fields.hpp"

#include <algorithm>
#include <cmath>

#include "driftlab/error.hpp"
#include "driftlab/parallel.hpp"

namespace driftlab {

namespace {

void require_finite(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) fail_validation(std::string(what) + " contains non-finite values");
}

}  // namespace

void require_same_mesh(const MeshPtr& a, const MeshPtr& b) {
  require(a && b, "field has no mesh");
  if (a.get() != b.get()) fail_validation("operands live on different meshes");
}

ScalarField::ScalarField(MeshPtr mesh, Layout layout, std::vector<double> values)
    : mesh_(std::move(mesh)), layout_(layout), values_(std::move(values)) {
  require(mesh_ != nullptr, "scalar field needs a mesh");
  const std::size_t expected =
      layout_ == Layout::Vertex ? mesh_->num_vertices() : mesh_->num_cells();
  require(values_.size() == expected, "scalar field has " + std::to_string(values_.size()) +
                                          " values, layout needs " + std::to_string(expected));
  require_finite(values_, "scalar field");
}

ScalarField ScalarField::zeros(MeshPtr mesh, Layout layout) {
  const std::size_t n = layout == Layout::Vertex ? mesh->num_vertices() : mesh->num_cells();
  return ScalarField(std::move(mesh), layout, std::vector<double>(n, 0.0));
}

double ScalarField::cell_mean(std::size_t k) const {
  if (layout_ == Layout::Cell) return values_[k];
  double s = 0.0;
  const auto idx = mesh_->cell(k);
  for (auto v : idx) s += values_[v];
  return s / idx.size();
}

double ScalarField::eval(std::size_t k, const std::array<double, 4>& bary) const {
  if (layout_ == Layout::Cell) return values_[k];
  double s = 0.0;
  const auto idx = mesh_->cell(k);
  for (std::size_t i = 0; i < idx.size(); ++i) s += bary[i] * values_[idx[i]];
  return s;
}

VectorField::VectorField(MeshPtr mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  require(mesh_ != nullptr, "vector field needs a mesh");
  dim_ = mesh_->dim();
  require(values_.size() == dim_ * mesh_->num_cells(), "vector field length must be n * cells");
  require_finite(values_, "vector field");
}

VectorField VectorField::zeros(MeshPtr mesh) {
  const std::size_t n = mesh->dim() * mesh->num_cells();
  return VectorField(std::move(mesh), std::vector<double>(n, 0.0));
}

Point VectorField::at(std::size_t k) const {
  Point p{};
  for (int d = 0; d < dim_; ++d) p[d] = values_[k * dim_ + d];
  return p;
}

void VectorField::set(std::size_t k, const Point& v) {
  for (int d = 0; d < dim_; ++d) values_[k * dim_ + d] = v[d];
}

SkewField::SkewField(MeshPtr mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  require(mesh_ != nullptr, "skew field needs a mesh");
  dim_ = mesh_->dim();
  require(values_.size() == entries_per_cell() * mesh_->num_cells(),
          "skew field length must be n(n-1)/2 * cells");
  require_finite(values_, "skew field");
}

SkewField SkewField::zeros(MeshPtr mesh) {
  const std::size_t n = (mesh->dim() == 2 ? 1 : 3) * mesh->num_cells();
  return SkewField(std::move(mesh), std::vector<double>(n, 0.0));
}

SkewField SkewField::from_scalar(const ScalarField& alpha) {
  const auto& mesh = alpha.mesh();
  require(mesh->dim() == 2, "scalar skew potentials are 2-D only");
  std::vector<double> v(mesh->num_cells());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = alpha.cell_mean(k);
  return SkewField(mesh, std::move(v));
}

SkewField SkewField::from_axial(const VectorField& w) {
  const auto& mesh = w.mesh();
  require(mesh->dim() == 3, "axial vectors define skew fields in 3-D only");
  std::vector<double> v(3 * mesh->num_cells());
  for (std::size_t k = 0; k < mesh->num_cells(); ++k) {
    const Point p = w.at(k);
    v[3 * k + 0] = -p[2];
    v[3 * k + 1] = p[1];
    v[3 * k + 2] = -p[0];
  }
  return SkewField(mesh, std::move(v));
}

std::array<std::array<double, 3>, 3> SkewField::matrix(std::size_t k) const {
  std::array<std::array<double, 3>, 3> m{};
  if (dim_ == 2) {
    m[0][1] = values_[k];
    m[1][0] = -values_[k];
  } else {
    const double* e = values_.data() + 3 * k;
    m[0][1] = e[0];
    m[1][0] = -e[0];
    m[0][2] = e[1];
    m[2][0] = -e[1];
    m[1][2] = e[2];
    m[2][1] = -e[2];
  }
  return m;
}

Point SkewField::apply(std::size_t k, const Point& xi) const {
  if (dim_ == 2) {
    const double a = values_[k];
    return {a * xi[1], -a * xi[0], 0.0};
  }
  const double* e = values_.data() + 3 * k;
  return {e[0] * xi[1] + e[1] * xi[2], -e[0] * xi[0] + e[2] * xi[2],
          -e[1] * xi[0] - e[2] * xi[1]};
}

double SkewField::frobenius(std::size_t k) const {
  double s = 0.0;
  for (double e : entries(k)) s += 2.0 * e * e;
  return std::sqrt(s);
}

double SkewField::max_abs() const {
  double m = 0.0;
  for (double e : values_) m = std::max(m, std::abs(e));
  return m;
}

const MeshPtr& Functional::mesh() const {
  if (density) return density->mesh();
  if (flux) return flux->mesh();
  fail_validation("functional has neither a density nor a flux part");
}

std::vector<double> Functional::load_vector() const {
  const Mesh& m = *mesh();
  if (density && flux) require_same_mesh(density->mesh(), flux->mesh());
  const int nv = m.vertices_per_cell();
  std::vector<double> b(m.num_vertices(), 0.0);
  // sequential scatter keeps the summation order fixed
  for (std::size_t k = 0; k < m.num_cells(); ++k) {
    const auto idx = m.cell(k);
    const double vol = m.volume(k);
    if (density) {
      if (density->layout() == Layout::Cell) {
        const double share = (*density)[k] * vol / nv;
        for (auto v : idx) b[v] += share;
      } else {
        // P1 mass matrix: vol/((n+1)(n+2)) * (1 + delta_ij)
        double sum = 0.0;
        for (auto v : idx) sum += (*density)[v];
        const double c = vol / ((nv) * (nv + 1));
        for (auto v : idx) b[v] += c * (sum + (*density)[v]);
      }
    }
    if (flux) {
      const auto g = m.geometry(k);
      const Point F = flux->at(k);
      for (int i = 0; i < nv; ++i) b[idx[i]] -= vol * dot(F, g.grad[i]);
    }
  }
  return b;
}

double Functional::apply(const ScalarField& phi) const {
  require(phi.layout() == Layout::Vertex, "test functions must have vertex layout");
  require_same_mesh(mesh(), phi.mesh());
  const auto b = load_vector();
  double s = 0.0;
  for (std::size_t v = 0; v < b.size(); ++v) s += b[v] * phi[v];
  return s;
}

VectorField gradient(const ScalarField& u) {
  require(u.layout() == Layout::Vertex, "gradient needs a vertex-layout field");
  const auto& mesh = u.mesh();
  const int dim = mesh->dim();
  std::vector<double> out(dim * mesh->num_cells());
  parallel_for(mesh->num_cells(), [&](std::size_t k) {
    const auto g = mesh->geometry(k);
    const auto idx = mesh->cell(k);
    Point s{};
    for (std::size_t i = 0; i < idx.size(); ++i) s = s + u[idx[i]] * g.grad[i];
    for (int d = 0; d < dim; ++d) out[k * dim + d] = s[d];
  });
  return VectorField(mesh, std::move(out));
}

double integrate(const ScalarField& f) {
  const Mesh& m = *f.mesh();
  return parallel_sum(m.num_cells(), [&](std::size_t k) { return m.volume(k) * f.cell_mean(k); });
}

double integrate(const ScalarField& f, std::span<const std::uint8_t> cell_mask) {
  const Mesh& m = *f.mesh();
  require(cell_mask.size() == m.num_cells(), "cell mask length must equal the cell count");
  return parallel_sum(m.num_cells(), [&](std::size_t k) {
    return cell_mask[k] ? m.volume(k) * f.cell_mean(k) : 0.0;
  });
}

double integrate_product(const ScalarField& a, const ScalarField& b) {
  require_same_mesh(a.mesh(), b.mesh());
  const Mesh& m = *a.mesh();
  const int nv = m.vertices_per_cell();
  return parallel_sum(m.num_cells(), [&](std::size_t k) {
    const double vol = m.volume(k);
    if (a.layout() == Layout::Cell || b.layout() == Layout::Cell)
      return vol * a.cell_mean(k) * b.cell_mean(k);
    const auto idx = m.cell(k);
    double sa = 0.0, sb = 0.0, sab = 0.0;
    for (auto v : idx) {
      sa += a[v];
      sb += b[v];
      sab += a[v] * b[v];
    }
    return vol * (sa * sb + sab) / (nv * (nv + 1));
  });
}

double integrate_dot(const VectorField& a, const VectorField& b) {
  require_same_mesh(a.mesh(), b.mesh());
  const Mesh& m = *a.mesh();
  return parallel_sum(m.num_cells(),
                      [&](std::size_t k) { return m.volume(k) * dot(a.at(k), b.at(k)); });
}

double integrate_function(const Mesh& mesh, const std::function<double(const Point&)>& f,
                          const SimplexRule& rule) {
  return parallel_sum(mesh.num_cells(), [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t q = 0; q < rule.weights.size(); ++q)
      s += rule.weights[q] * f(mesh.map(k, rule.bary[q]));
    return mesh.volume(k) * s;
  });
}

double integrate_function(const Mesh& mesh, const std::function<double(const Point&)>& f) {
  return integrate_function(mesh, f, degree2_rule(mesh.dim()));
}

double h1_seminorm(const ScalarField& u) {
  const auto g = gradient(u);
  return std::sqrt(integrate_dot(g, g));
}

double l2_norm(const ScalarField& f) { return std::sqrt(std::max(0.0, integrate_product(f, f))); }

double l2_norm(const VectorField& a) { return std::sqrt(integrate_dot(a, a)); }

double l2_norm(const SkewField& A) {
  const Mesh& m = *A.mesh();
  return std::sqrt(parallel_sum(m.num_cells(), [&](std::size_t k) {
    const double f = A.frobenius(k);
    return m.volume(k) * f * f;
  }));
}

ScalarField magnitude(const VectorField& a) {
  std::vector<double> v(a.num_cells());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = norm(a.at(k));
  return ScalarField(a.mesh(), Layout::Cell, std::move(v));
}

ScalarField magnitude(const SkewField& A) {
  std::vector<double> v(A.num_cells());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = A.frobenius(k);
  return ScalarField(A.mesh(), Layout::Cell, std::move(v));
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_mesh(a.mesh(), b.mesh());
  require(a.layout() == b.layout(), "layouts differ");
  auto v = a.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += b[i];
  return ScalarField(a.mesh(), a.layout(), std::move(v));
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) { return a + (-1.0) * b; }

ScalarField operator*(double s, const ScalarField& a) {
  auto v = a.values();
  for (double& x : v) x *= s;
  return ScalarField(a.mesh(), a.layout(), std::move(v));
}

SkewField operator+(const SkewField& a, const SkewField& b) {
  require_same_mesh(a.mesh(), b.mesh());
  auto v = a.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += b.values()[i];
  return SkewField(a.mesh(), std::move(v));
}

SkewField operator*(double s, const SkewField& a) {
  auto v = a.values();
  for (double& x : v) x *= s;
  return SkewField(a.mesh(), std::move(v));
}

VectorField operator*(double s, const VectorField& a) {
  auto v = a.values();
  for (double& x : v) x *= s;
  return VectorField(a.mesh(), std::move(v));
}

}  // namespace driftlab
