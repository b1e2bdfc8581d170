#include "driftlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "driftlab/error.hpp"

namespace driftlab {

double norm(const Point& a) { return std::sqrt(dot(a, a)); }

int Domain::dimension() const {
  return (kind == DomainKind::UnitSquare || kind == DomainKind::UnitDisk) ? 2 : 3;
}

std::string Domain::name() const {
  switch (kind) {
    case DomainKind::UnitSquare: return "unit_square";
    case DomainKind::UnitDisk: return "unit_disk";
    case DomainKind::UnitCube: return "unit_cube";
    case DomainKind::UnitBall: return "unit_ball";
  }
  return "unknown";
}

Domain Domain::parse(std::string_view name) {
  if (name == "unit_square") return {DomainKind::UnitSquare};
  if (name == "unit_disk") return {DomainKind::UnitDisk};
  if (name == "unit_cube") return {DomainKind::UnitCube};
  if (name == "unit_ball") return {DomainKind::UnitBall};
  fail_validation("unsupported domain kind '" + std::string(name) +
                  "' (expected unit_square, unit_disk, unit_cube or unit_ball)");
}

double Domain::measure() const {
  switch (kind) {
    case DomainKind::UnitSquare:
    case DomainKind::UnitCube: return 1.0;
    case DomainKind::UnitDisk: return std::numbers::pi;
    case DomainKind::UnitBall: return 4.0 * std::numbers::pi / 3.0;
  }
  return 0.0;
}

double Domain::diameter() const {
  switch (kind) {
    case DomainKind::UnitSquare: return std::sqrt(2.0);
    case DomainKind::UnitCube: return std::sqrt(3.0);
    default: return 2.0;
  }
}

Point Domain::center() const {
  if (is_round()) return {0.0, 0.0, 0.0};
  return dimension() == 2 ? Point{0.5, 0.5, 0.0} : Point{0.5, 0.5, 0.5};
}

Point Domain::box_lo() const {
  const double lo = is_round() ? -1.0 : 0.0;
  return dimension() == 2 ? Point{lo, lo, 0.0} : Point{lo, lo, lo};
}

Point Domain::box_hi() const {
  return dimension() == 2 ? Point{1.0, 1.0, 0.0} : Point{1.0, 1.0, 1.0};
}

bool Domain::contains(const Point& x, double tol) const {
  if (is_round()) return norm(x) <= 1.0 + tol;
  for (int d = 0; d < dimension(); ++d)
    if (x[d] < -tol || x[d] > 1.0 + tol) return false;
  return true;
}

Mesh::Mesh(Domain domain, std::vector<Point> vertices, std::vector<std::int32_t> cells,
           std::vector<std::uint8_t> boundary, int resolution, MeshOptions options)
    : domain_(domain),
      dim_(domain.dimension()),
      resolution_(resolution),
      options_(options),
      vertices_(std::move(vertices)),
      cells_(std::move(cells)),
      boundary_(std::move(boundary)) {
  const int nv = vertices_per_cell();
  require(cells_.size() % nv == 0, "cell table length is not a multiple of n+1");
  require(boundary_.size() == vertices_.size(), "boundary flags must match vertex count");
  const std::size_t nc = cells_.size() / nv;
  volumes_.resize(nc);
  for (std::size_t k = 0; k < nc; ++k) {
    auto c = cell(k);
    for (int i = 0; i < nv; ++i)
      require(c[i] >= 0 && static_cast<std::size_t>(c[i]) < vertices_.size(),
              "cell references a vertex out of range");
    const Point e1 = vertices_[c[1]] - vertices_[c[0]];
    const Point e2 = vertices_[c[2]] - vertices_[c[0]];
    double det;
    if (dim_ == 2) {
      det = e1[0] * e2[1] - e1[1] * e2[0];
    } else {
      const Point e3 = vertices_[c[3]] - vertices_[c[0]];
      det = dot(e1, cross(e2, e3));
    }
    if (det < 0.0) {
      std::swap(cells_[k * nv + nv - 1], cells_[k * nv + nv - 2]);
      det = -det;
    }
    volumes_[k] = det / (dim_ == 2 ? 2.0 : 6.0);
    if (!(volumes_[k] > 0.0)) throw NumericalError("degenerate cell " + std::to_string(k));
    total_volume_ += volumes_[k];
    h_ = std::max(h_, cell_diameter(k));
  }
}

Point Mesh::centroid(std::size_t k) const {
  Point c{};
  const auto idx = cell(k);
  for (auto v : idx) c = c + vertices_[v];
  return (1.0 / idx.size()) * c;
}

double Mesh::cell_diameter(std::size_t k) const {
  const auto idx = cell(k);
  double d = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j)
      d = std::max(d, norm(vertices_[idx[i]] - vertices_[idx[j]]));
  return d;
}

CellGeometry Mesh::geometry(std::size_t k) const {
  CellGeometry g;
  g.volume = volumes_[k];
  g.centroid = centroid(k);
  const auto idx = cell(k);
  const Point& p0 = vertices_[idx[0]];
  if (dim_ == 2) {
    const Point e1 = vertices_[idx[1]] - p0;
    const Point e2 = vertices_[idx[2]] - p0;
    const double det = e1[0] * e2[1] - e1[1] * e2[0];
    // rows of the inverse Jacobian
    g.grad[1] = {e2[1] / det, -e2[0] / det, 0.0};
    g.grad[2] = {-e1[1] / det, e1[0] / det, 0.0};
    g.grad[0] = -1.0 * (g.grad[1] + g.grad[2]);
  } else {
    const Point e1 = vertices_[idx[1]] - p0;
    const Point e2 = vertices_[idx[2]] - p0;
    const Point e3 = vertices_[idx[3]] - p0;
    const double det = dot(e1, cross(e2, e3));
    g.grad[1] = (1.0 / det) * cross(e2, e3);
    g.grad[2] = (1.0 / det) * cross(e3, e1);
    g.grad[3] = (1.0 / det) * cross(e1, e2);
    g.grad[0] = -1.0 * (g.grad[1] + g.grad[2] + g.grad[3]);
  }
  return g;
}

Point Mesh::map(std::size_t k, const std::array<double, 4>& bary) const {
  Point x{};
  const auto idx = cell(k);
  for (std::size_t i = 0; i < idx.size(); ++i) x = x + bary[i] * vertices_[idx[i]];
  return x;
}

const std::vector<double>& Mesh::vertex_measure() const {
  std::call_once(measure_once_, [this] {
    vertex_measure_.assign(vertices_.size(), 0.0);
    const int nv = vertices_per_cell();
    for (std::size_t k = 0; k < num_cells(); ++k)
      for (auto v : cell(k)) vertex_measure_[v] += volumes_[k] / nv;
  });
  return vertex_measure_;
}

const Mesh::Incidence& Mesh::incidence() const {
  std::call_once(incidence_once_, [this] {
    incidence_.offsets.assign(vertices_.size() + 1, 0);
    for (auto v : cells_) ++incidence_.offsets[v + 1];
    for (std::size_t v = 0; v < vertices_.size(); ++v)
      incidence_.offsets[v + 1] += incidence_.offsets[v];
    incidence_.cells.resize(cells_.size());
    std::vector<std::size_t> fill(incidence_.offsets.begin(), incidence_.offsets.end() - 1);
    const int nv = vertices_per_cell();
    for (std::size_t k = 0; k < num_cells(); ++k)
      for (int i = 0; i < nv; ++i)
        incidence_.cells[fill[cells_[k * nv + i]]++] = static_cast<std::int32_t>(k);
  });
  return incidence_;
}

namespace {

// Kuhn split of the unit cube into n! simplices: one per axis permutation,
// walking from the start corner along the permuted axes.
template <int N>
void kuhn_cells(const std::array<int, N>& lower, const std::array<int, N>& dir, int stride_y,
                int stride_z, std::vector<std::int32_t>& out) {
  std::array<int, N> perm;
  for (int i = 0; i < N; ++i) perm[i] = i;
  std::array<int, N> start;
  for (int i = 0; i < N; ++i) start[i] = lower[i] + (dir[i] < 0 ? 1 : 0);
  auto index = [&](const std::array<int, N>& p) {
    int id = p[0] + p[1] * stride_y;
    if constexpr (N == 3) id += p[2] * stride_z;
    return id;
  };
  do {
    auto p = start;
    out.push_back(index(p));
    for (int k = 0; k < N; ++k) {
      p[perm[k]] += dir[perm[k]];
      out.push_back(index(p));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
}

Point round_map(const Point& p, int dim, double grading) {
  double inf = 0.0;
  for (int d = 0; d < dim; ++d) inf = std::max(inf, std::abs(p[d]));
  const double two = norm(p);
  if (two == 0.0) return {0.0, 0.0, 0.0};
  const double radius = inf >= 1.0 ? 1.0 : std::pow(inf, grading);
  return (radius / two) * p;
}

}  // namespace

MeshPtr build_mesh(const Domain& domain, int resolution, MeshOptions options) {
  require(resolution >= 2, "resolution must be >= 2 (got " + std::to_string(resolution) + ")");
  require(options.radial_grading >= 1.0, "radial_grading must be >= 1");
  const int dim = domain.dimension();
  const int r = resolution;
  const int np = r + 1;
  const bool round = domain.is_round();
  const double lo = round ? -1.0 : 0.0;
  const double step = (round ? 2.0 : 1.0) / r;

  std::vector<Point> vertices;
  std::vector<std::uint8_t> boundary;
  const std::size_t nverts = dim == 2 ? std::size_t(np) * np : std::size_t(np) * np * np;
  vertices.reserve(nverts);
  boundary.reserve(nverts);
  const int nz = dim == 3 ? np : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i) {
        Point p{lo + i * step, lo + j * step, dim == 3 ? lo + k * step : 0.0};
        // exact grid coordinates for the outer layer
        if (i == r) p[0] = 1.0;
        if (j == r) p[1] = 1.0;
        if (dim == 3 && k == r) p[2] = 1.0;
        if (round && 2 * i == r) p[0] = 0.0;
        if (round && 2 * j == r) p[1] = 0.0;
        if (round && dim == 3 && 2 * k == r) p[2] = 0.0;
        const bool on_edge =
            i == 0 || i == r || j == 0 || j == r || (dim == 3 && (k == 0 || k == r));
        vertices.push_back(round ? round_map(p, dim, options.radial_grading) : p);
        boundary.push_back(on_edge ? 1 : 0);
      }

  std::vector<std::int32_t> cells;
  const std::size_t ncubes = dim == 2 ? std::size_t(r) * r : std::size_t(r) * r * r;
  cells.reserve(ncubes * (dim == 2 ? 2 * 3 : 6 * 4));
  const int stride_y = np;
  const int stride_z = np * np;
  // Round domains use a split reflected through the origin so the mesh has
  // the symmetries of the cube [-1,1]^n; every cell starts at the corner
  // nearest the origin.
  auto direction = [&](int i) { return (round && 2 * i + 1 < r) ? -1 : 1; };
  if (dim == 2) {
    for (int j = 0; j < r; ++j)
      for (int i = 0; i < r; ++i)
        kuhn_cells<2>({i, j}, {direction(i), direction(j)}, stride_y, stride_z, cells);
  } else {
    for (int k = 0; k < r; ++k)
      for (int j = 0; j < r; ++j)
        for (int i = 0; i < r; ++i)
          kuhn_cells<3>({i, j, k}, {direction(i), direction(j), direction(k)}, stride_y,
                        stride_z, cells);
  }
  return std::make_shared<const Mesh>(domain, std::move(vertices), std::move(cells),
                                      std::move(boundary), resolution, options);
}

}  // namespace driftlab
