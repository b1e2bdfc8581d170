#include "driftlab/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "driftlab/error.hpp"
#include "driftlab/quadrature.hpp"

namespace driftlab {

namespace {

double far_distance(const Point& x, const Point& lo, const Point& hi) {
  double s = 0.0;
  for (int d = 0; d < 3; ++d) {
    const double t = std::max(std::abs(x[d] - lo[d]), std::abs(x[d] - hi[d]));
    s += t * t;
  }
  return std::sqrt(s);
}

double near_distance(const Point& x, const Point& lo, const Point& hi) {
  double s = 0.0;
  for (int d = 0; d < 3; ++d) {
    const double t = std::max({lo[d] - x[d], 0.0, x[d] - hi[d]});
    s += t * t;
  }
  return std::sqrt(s);
}

}  // namespace

CellTree::CellTree(MeshPtr mesh, std::size_t leaf_size) : mesh_(std::move(mesh)) {
  require(mesh_ != nullptr, "cell tree needs a mesh");
  const std::size_t nc = mesh_->num_cells();
  centroid_.resize(nc);
  radius_.resize(nc);
  order_.resize(nc);
  for (std::size_t k = 0; k < nc; ++k) {
    centroid_[k] = mesh_->centroid(k);
    double r = 0.0;
    for (auto v : mesh_->cell(k)) r = std::max(r, norm(mesh_->vertex(v) - centroid_[k]));
    radius_[k] = r;
    max_radius_ = std::max(max_radius_, r);
    order_[k] = static_cast<std::int32_t>(k);
  }
  nodes_.reserve(4 * nc / std::max<std::size_t>(leaf_size, 1) + 2);
  if (nc > 0) build(0, static_cast<std::uint32_t>(nc), std::max<std::size_t>(leaf_size, 1));

  node_volume_.assign(nodes_.size(), 0.0);
  node_vcenter_.assign(nodes_.size(), Point{});
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    const Node& n = nodes_[i];
    if (n.left < 0) {
      Point c{};
      double vol = 0.0;
      for (auto p = n.begin; p < n.end; ++p) {
        const auto k = order_[p];
        vol += mesh_->volume(k);
        c = c + mesh_->volume(k) * centroid_[k];
      }
      node_volume_[i] = vol;
      node_vcenter_[i] = (1.0 / vol) * c;
    } else {
      const double vl = node_volume_[n.left], vr = node_volume_[n.right];
      node_volume_[i] = vl + vr;
      node_vcenter_[i] =
          (1.0 / (vl + vr)) * (vl * node_vcenter_[n.left] + vr * node_vcenter_[n.right]);
    }
  }
}

std::int32_t CellTree::build(std::uint32_t begin, std::uint32_t end, std::size_t leaf_size) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  Node node;
  node.begin = begin;
  node.end = end;
  const double inf = std::numeric_limits<double>::infinity();
  node.lo = {inf, inf, inf};
  node.hi = {-inf, -inf, -inf};
  Point clo = node.lo, chi = node.hi;
  for (auto p = begin; p < end; ++p) {
    const auto k = order_[p];
    for (auto v : mesh_->cell(k)) {
      const Point& x = mesh_->vertex(v);
      for (int d = 0; d < 3; ++d) {
        node.lo[d] = std::min(node.lo[d], x[d]);
        node.hi[d] = std::max(node.hi[d], x[d]);
      }
    }
    for (int d = 0; d < 3; ++d) {
      clo[d] = std::min(clo[d], centroid_[k][d]);
      chi[d] = std::max(chi[d], centroid_[k][d]);
    }
  }
  node.size = norm(node.hi - node.lo);
  if (end - begin > leaf_size) {
    int axis = 0;
    for (int d = 1; d < 3; ++d)
      if (chi[d] - clo[d] > chi[axis] - clo[axis]) axis = d;
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::int32_t a, std::int32_t b) {
                       if (centroid_[a][axis] != centroid_[b][axis])
                         return centroid_[a][axis] < centroid_[b][axis];
                       return a < b;
                     });
    node.left = build(begin, mid, leaf_size);
    node.right = build(mid, end, leaf_size);
  }
  nodes_[id] = node;
  return id;
}

CellTree::Weights CellTree::aggregate(std::span<const double> cell_values) const {
  require(cell_values.size() == mesh_->num_cells(), "one value per cell expected");
  Weights w;
  const std::size_t nc = mesh_->num_cells();
  w.cell_mass.resize(nc);
  for (std::size_t k = 0; k < nc; ++k) w.cell_mass[k] = mesh_->volume(k) * cell_values[k];
  w.node_mass.assign(nodes_.size(), 0.0);
  w.node_abs_mass.assign(nodes_.size(), 0.0);
  w.node_center.assign(nodes_.size(), Point{});
  std::vector<Point> moment(nodes_.size(), Point{});
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    const Node& n = nodes_[i];
    if (n.left < 0) {
      for (auto p = n.begin; p < n.end; ++p) {
        const auto k = order_[p];
        const double m = w.cell_mass[k];
        w.node_mass[i] += m;
        w.node_abs_mass[i] += std::abs(m);
        moment[i] = moment[i] + std::abs(m) * centroid_[k];
      }
    } else {
      w.node_mass[i] = w.node_mass[n.left] + w.node_mass[n.right];
      w.node_abs_mass[i] = w.node_abs_mass[n.left] + w.node_abs_mass[n.right];
      moment[i] = moment[n.left] + moment[n.right];
    }
    w.node_center[i] = w.node_abs_mass[i] > 0.0 ? (1.0 / w.node_abs_mass[i]) * moment[i]
                                                : node_vcenter_[i];
  }
  return w;
}

double CellTree::cell_fraction_in_ball(std::size_t k, const Point& x, double R) const {
  const auto& rule = high_order_rule(mesh_->dim());
  double f = 0.0;
  for (std::size_t q = 0; q < rule.weights.size(); ++q)
    if (norm(mesh_->map(k, rule.bary[q]) - x) < R) f += rule.weights[q];
  return f;
}

double CellTree::ball_integral(const Weights& w, const Point& x, double R, double eps,
                               bool fractional) const {
  if (nodes_.empty() || R <= 0.0) return 0.0;
  double total = 0.0;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& n = nodes_[stack.back()];
    const auto id = stack.back();
    stack.pop_back();
    if (far_distance(x, n.lo, n.hi) <= R) {
      total += w.node_mass[id];
      continue;
    }
    if (near_distance(x, n.lo, n.hi) >= R) continue;
    if (n.left < 0) {
      for (auto p = n.begin; p < n.end; ++p) {
        const auto k = order_[p];
        const double d = norm(centroid_[k] - x);
        if (d + radius_[k] <= R)
          total += w.cell_mass[k];
        else if (d - radius_[k] < R)
          total += fractional ? w.cell_mass[k] * cell_fraction_in_ball(k, x, R)
                              : (d < R ? w.cell_mass[k] : 0.0);
      }
      continue;
    }
    if (n.size <= eps * R) {
      if (norm(node_vcenter_[id] - x) < R) total += w.node_mass[id];
      continue;
    }
    stack.push_back(n.left);
    stack.push_back(n.right);
  }
  return total;
}

double CellTree::ball_volume(const Point& x, double R, double eps) const {
  Weights w;
  w.node_mass = node_volume_;
  w.cell_mass.resize(mesh_->num_cells());
  for (std::size_t k = 0; k < w.cell_mass.size(); ++k) w.cell_mass[k] = mesh_->volume(k);
  return ball_integral(w, x, R, eps);
}

double CellTree::kernel_sum(const Weights& w, const Point& x,
                            const std::function<double(double)>& kernel, double theta,
                            double near_factor,
                            const std::function<double(std::size_t)>& near) const {
  if (nodes_.empty()) return 0.0;
  double total = 0.0;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    const Node& n = nodes_[id];
    if (w.node_abs_mass[id] == 0.0) continue;
    const double dist = norm(w.node_center[id] - x);
    if (n.left >= 0 && n.size < theta * dist && near_distance(x, n.lo, n.hi) > 0.0) {
      total += w.node_mass[id] * kernel(dist);
      continue;
    }
    if (n.left < 0) {
      for (auto p = n.begin; p < n.end; ++p) {
        const auto k = order_[p];
        if (w.cell_mass[k] == 0.0) continue;
        const double d = norm(centroid_[k] - x);
        total += d < near_factor * radius_[k] ? near(k) : w.cell_mass[k] * kernel(d);
      }
      continue;
    }
    stack.push_back(n.left);
    stack.push_back(n.right);
  }
  return total;
}

PointLocator::PointLocator(MeshPtr mesh) : mesh_(std::move(mesh)) {
  const int dim = mesh_->dim();
  const std::size_t nc = mesh_->num_cells();
  const double inf = std::numeric_limits<double>::infinity();
  Point lo{inf, inf, inf}, hi{-inf, -inf, -inf};
  for (const auto& v : mesh_->vertices())
    for (int d = 0; d < dim; ++d) {
      lo[d] = std::min(lo[d], v[d]);
      hi[d] = std::max(hi[d], v[d]);
    }
  const int per_axis = std::max(1, static_cast<int>(std::pow(double(nc) / 4.0, 1.0 / dim)));
  lo_ = lo;
  for (int d = 0; d < 3; ++d) {
    if (d < dim) {
      dims_[d] = per_axis;
      cell_size_[d] = (hi[d] - lo[d]) / per_axis;
    } else {
      dims_[d] = 1;
      lo_[d] = -1.0;
      cell_size_[d] = 2.0;
    }
  }
  const std::size_t nb = std::size_t(dims_[0]) * dims_[1] * dims_[2];
  std::vector<std::vector<std::int32_t>> lists(nb);
  centroid_.resize(nc);
  for (std::size_t k = 0; k < nc; ++k) {
    centroid_[k] = mesh_->centroid(k);
    std::array<int, 3> a{0, 0, 0}, b{0, 0, 0};
    Point clo{inf, inf, inf}, chi{-inf, -inf, -inf};
    for (auto v : mesh_->cell(k))
      for (int d = 0; d < dim; ++d) {
        clo[d] = std::min(clo[d], mesh_->vertex(v)[d]);
        chi[d] = std::max(chi[d], mesh_->vertex(v)[d]);
      }
    for (int d = 0; d < dim; ++d) {
      a[d] = std::clamp(static_cast<int>((clo[d] - lo_[d]) / cell_size_[d]), 0, dims_[d] - 1);
      b[d] = std::clamp(static_cast<int>((chi[d] - lo_[d]) / cell_size_[d]), 0, dims_[d] - 1);
    }
    for (int i = a[0]; i <= b[0]; ++i)
      for (int j = a[1]; j <= b[1]; ++j)
        for (int l = a[2]; l <= b[2]; ++l)
          lists[(std::size_t(l) * dims_[1] + j) * dims_[0] + i].push_back(
              static_cast<std::int32_t>(k));
  }
  offsets_.assign(nb + 1, 0);
  for (std::size_t b = 0; b < nb; ++b) offsets_[b + 1] = offsets_[b] + lists[b].size();
  cells_.reserve(offsets_[nb]);
  for (auto& l : lists) cells_.insert(cells_.end(), l.begin(), l.end());
}

std::size_t PointLocator::bucket_of(const Point& x) const {
  std::array<int, 3> idx{};
  for (int d = 0; d < 3; ++d)
    idx[d] = std::clamp(static_cast<int>(std::floor((x[d] - lo_[d]) / cell_size_[d])), 0,
                        dims_[d] - 1);
  return (std::size_t(idx[2]) * dims_[1] + idx[1]) * dims_[0] + idx[0];
}

bool PointLocator::inside(std::size_t k, const Point& x, double tol) const {
  const auto g = mesh_->geometry(k);
  const double base = 1.0 / mesh_->vertices_per_cell();
  for (int i = 0; i < mesh_->vertices_per_cell(); ++i)
    if (base + dot(g.grad[i], x - g.centroid) < -tol) return false;
  return true;
}

std::size_t PointLocator::locate(const Point& x) const {
  const std::size_t b = bucket_of(x);
  for (auto p = offsets_[b]; p < offsets_[b + 1]; ++p)
    if (inside(cells_[p], x, 1e-12)) return cells_[p];
  // outside the mesh or on a curved boundary facet: nearest centroid
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  auto scan = [&](std::size_t bucket) {
    for (auto p = offsets_[bucket]; p < offsets_[bucket + 1]; ++p) {
      const double d = norm(centroid_[cells_[p]] - x);
      if (d < best_d) {
        best_d = d;
        best = cells_[p];
      }
    }
  };
  scan(b);
  if (!std::isfinite(best_d))
    for (std::size_t k = 0; k < centroid_.size(); ++k) {
      const double d = norm(centroid_[k] - x);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
  return best;
}

namespace {

double simplex_volume(const SimplexCorners& s, int dim) {
  const Point e1 = s[1] - s[0], e2 = s[2] - s[0];
  if (dim == 2) return 0.5 * std::abs(e1[0] * e2[1] - e1[1] * e2[0]);
  return std::abs(dot(e1, cross(e2, s[3] - s[0]))) / 6.0;
}

// Midpoint subdivision into 2^dim children; child 0 is the corner at s[0].
std::vector<SimplexCorners> subdivide(const SimplexCorners& s, int dim) {
  using S = SimplexCorners;
  auto mid = [&](int i, int j) { return 0.5 * (s[i] + s[j]); };
  if (dim == 2) {
    const Point m01 = mid(0, 1), m02 = mid(0, 2), m12 = mid(1, 2);
    return {S{s[0], m01, m02, {}}, S{m01, s[1], m12, {}}, S{m02, m12, s[2], {}},
            S{m01, m12, m02, {}}};
  }
  const Point m01 = mid(0, 1), m02 = mid(0, 2), m03 = mid(0, 3), m12 = mid(1, 2),
              m13 = mid(1, 3), m23 = mid(2, 3);
  return {S{s[0], m01, m02, m03}, S{m01, s[1], m12, m13}, S{m02, m12, s[2], m23},
          S{m03, m13, m23, s[3]}, S{m01, m02, m03, m13}, S{m01, m02, m12, m13},
          S{m02, m03, m13, m23},  S{m02, m12, m13, m23}};
}

}  // namespace

double regular_simplex_integral(const SimplexCorners& s, int dim, const Point& x, double power,
                                int levels) {
  if (levels > 0) {
    double sum = 0.0;
    for (const auto& c : subdivide(s, dim))
      sum += regular_simplex_integral(c, dim, x, power, levels - 1);
    return sum;
  }
  static const SimplexRule tri = collapsed_rule(2, 3);
  static const SimplexRule tet = collapsed_rule(3, 3);
  const auto& rule = dim == 2 ? tri : tet;
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.weights.size(); ++q) {
    Point y{};
    for (int i = 0; i <= dim; ++i) y = y + rule.bary[q][i] * s[i];
    const double d = norm(y - x);
    sum += rule.weights[q] * (power == 1.0 ? 1.0 / d : power == 2.0 ? 1.0 / (d * d) : std::pow(d, -power));
  }
  return simplex_volume(s, dim) * sum;
}

double singular_simplex_integral(const SimplexCorners& s, int dim, double power) {
  // The corner child is a half-scale copy of K: I = I_rest + 2^{power-dim} I.
  const auto children = subdivide(s, dim);
  double rest = 0.0;
  for (std::size_t c = 1; c < children.size(); ++c)
    rest += regular_simplex_integral(children[c], dim, s[0], power, 1);
  return rest / (1.0 - std::pow(2.0, power - dim));
}

}  // namespace driftlab
