#pragma once

#include <cstdint>

#include "driftlab/fields.hpp"

namespace driftlab {

/// Relative tolerance of the solenoidality gate.
inline constexpr double kSolenoidalTolerance = 1e-6;

/// max over interior hats of |int a . grad phi_v| / |grad phi_v|_2, divided
/// by |a|_2 (0 for a = 0).
double solenoidality_residual(const VectorField& a);
/// Throws ValidationError when the residual exceeds the tolerance.
void require_solenoidal(const VectorField& a, double tolerance = kSolenoidalTolerance);

/// Stream function alpha with (-alpha_y, alpha_x) = a, zero mean, from the
/// Neumann problem int grad alpha . grad psi = int (a_1, -a_0) . grad psi.
ScalarField stream_function_2d(const VectorField& a);
/// Skew field with the single entry alpha (cell means).
SkewField stream_potential_2d(const VectorField& a);

/// A xi = w x xi with w(x) = int_0^1 a(tx) x tx dt on the unit ball.
SkewField poincare_potential_ball(const VectorField& a, int nodes = 64);
/// The axial vector w of the construction, at cell centroids.
VectorField poincare_axial_vector(const VectorField& a, int nodes = 64);

/// A_ij = d_j V_i - d_i V_j with V = (4 pi)^-1 int a(y) / |x - y| dy,
/// evaluated at vertices and differentiated as a P1 field. Requires a
/// vanishing normal trace.
SkewField newtonian_potential(const VectorField& a);
/// max over test functions (x_i, x_i^2, x_i x_j, boundary hats) of
/// |int a . grad phi| / (|a|_2 |grad phi|_2).
double boundary_flux_residual(const VectorField& a);

/// max over test functions phi and components i of
/// |int A_ji d_j phi + int a_i phi| / |phi|_{W^{1,2}}. Tests are
/// `test_count` interior hats spread over the mesh plus 10 random smooth
/// functions vanishing on the boundary.
double weak_div_residual(const SkewField& A, const VectorField& a, int test_count = 200,
                         std::uint64_t seed = 1);

}  // namespace driftlab
