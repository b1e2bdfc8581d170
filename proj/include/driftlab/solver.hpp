#pragma once

#include <vector>

#include "driftlab/fields.hpp"
#include "driftlab/sparse.hpp"

namespace driftlab {

/// Discrete system over the interior vertices.
struct LinearSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  /// dof index of each vertex, -1 on the boundary.
  std::vector<std::int32_t> dof_of_vertex;
  std::vector<std::int32_t> vertex_of_dof;
};

enum class ConvectionForm {
  /// 1/2 int (u a.grad phi - phi a.grad u): skew by construction.
  SkewSymmetric,
  /// int u a.grad phi, as written in the weak formulation.
  Conservative
};

struct SolverOptions {
  KrylovOptions krylov;
  /// Stop rule of the truncation schedule: increment <= stop_rtol * |grad u|.
  double stop_rtol = 1e-8;
  ConvectionForm convection = ConvectionForm::SkewSymmetric;
};

struct SolveReport {
  ScalarField u;
  std::vector<double> truncation_levels;
  /// |grad(u_{N_k} - u_{N_{k+1}})|_2 between consecutive levels.
  std::vector<double> increments;
  /// |grad u_N|_2 and the a-priori bound C_P |g|_2 + |flux|_2 per level.
  std::vector<double> h1_norms;
  std::vector<double> apriori_bounds;
  /// Final relative residual of each level's linear solve.
  std::vector<double> linear_residuals;
  std::vector<int> iterations;
  double bracket_uu = 0.0;
  double energy_defect = 0.0;
  double poincare_constant = 0.0;
  bool converged = false;
};

/// Clamps every stored entry to [-N, N].
SkewField truncate_skew(const SkewField& A, double N);
/// Clamps every component to [-N, N].
VectorField truncate_vector(const VectorField& a, double N);

/// int (grad u + A grad u) . grad phi = (f, phi) over interior vertices.
LinearSystem assemble(const MeshPtr& mesh, const SkewField& A, const Functional& f);
/// int (grad u + a u) . grad phi = (f, phi).
LinearSystem assemble_drift(const MeshPtr& mesh, const VectorField& a, const Functional& f,
                            ConvectionForm form = ConvectionForm::SkewSymmetric);

/// Solves an assembled system, returning the vertex field (zero on the
/// boundary) and the Krylov record.
ScalarField solve_system(const MeshPtr& mesh, const LinearSystem& system,
                         const KrylovOptions& options, KrylovResult* record = nullptr);

ScalarField solve_truncated(const MeshPtr& mesh, const SkewField& A, double N, const Functional& f,
                            const SolverOptions& options = {}, KrylovResult* record = nullptr);
ScalarField solve_drift(const MeshPtr& mesh, const VectorField& a, double N, const Functional& f,
                        const SolverOptions& options = {}, KrylovResult* record = nullptr);

/// [u, v] = int A grad u . grad v.
double bracket(const ScalarField& u, const ScalarField& v, const SkewField& A);
/// (f, u) - int |grad u|^2.
double energy_defect(const ScalarField& u, const Functional& f);

/// Smallest C with |u|_2 <= C |grad u|_2 on the discrete space.
double discrete_poincare_constant(const MeshPtr& mesh);

SolveReport approximation_solution(const MeshPtr& mesh, const SkewField& A, const Functional& f,
                                   const std::vector<double>& schedule,
                                   const SolverOptions& options = {});

/// Runs approximation_solution with f = 0 and returns the final |grad u|_2.
double null_test(const MeshPtr& mesh, const SkewField& A, const std::vector<double>& schedule,
                 const SolverOptions& options = {});

/// Default schedule 2^0 .. 2^10.
std::vector<double> default_schedule();

}  // namespace driftlab
