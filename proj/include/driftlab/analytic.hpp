#pragma once

#include <functional>
#include <string>

#include "driftlab/fields.hpp"

namespace driftlab {

using ScalarFn = std::function<double(const Point&)>;
using VectorFn = std::function<Point(const Point&)>;

enum class Sampling { Vertex, Centroid, CellAverage };

/// Scalar field specs, with r = |x - domain.center()|:
///   zero, const:c, coord:i, neg_log_r, log_r, log_r_masked, r_pow:q,
///   paraboloid (1 - r^2), sin_product:k (prod sin(k x_i)),
///   sin_pi_product:m (prod sin(m pi x_i)), bump, indicator_ball:R
ScalarFn parse_scalar_spec(const std::string& spec, const Domain& domain);

/// Vector field specs: zero, rotation, rotation_gauss, const_e3,
///   curl_bump, perp_grad_sin, zhikov
VectorFn parse_vector_spec(const std::string& spec, const Domain& domain);

ScalarField sample_scalar(const MeshPtr& mesh, const ScalarFn& f, Sampling how);
ScalarField sample_scalar(const MeshPtr& mesh, const std::string& spec, Sampling how);

/// Cell averages by the high-order interior rule unless `how` says otherwise.
VectorField sample_vector(const MeshPtr& mesh, const VectorFn& f,
                          Sampling how = Sampling::CellAverage);
/// "curl:<scalar spec>" gives discrete_curl of the vertex interpolant.
VectorField sample_vector(const MeshPtr& mesh, const std::string& spec,
                          Sampling how = Sampling::CellAverage);

/// Cellwise (d_y psi, -d_x psi, 0), the curl of (0, 0, psi) for a P1 field.
/// Exactly weakly divergence-free; tangent to the boundary when psi is
/// constant there.
VectorField discrete_curl(const ScalarField& psi);

/// Skew field whose independent entries all equal f.
SkewField sample_skew(const MeshPtr& mesh, const ScalarFn& f,
                      Sampling how = Sampling::CellAverage);
/// Skew specs: "none", "skew:<scalar spec>", or "axial:<vector spec>" (3-D).
SkewField sample_skew(const MeshPtr& mesh, const std::string& spec,
                      Sampling how = Sampling::CellAverage);

/// Bounded random skew field: each entry a smooth random trigonometric
/// combination with amplitude at most `amplitude`.
SkewField random_skew(const MeshPtr& mesh, std::uint64_t seed, double amplitude = 1.0);
/// Constant skew field with all independent entries equal to c.
SkewField constant_skew(const MeshPtr& mesh, double c);

}  // namespace driftlab
