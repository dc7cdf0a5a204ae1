#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "insulation/mesh.hpp"
#include "insulation/sparse.hpp"

namespace insulation {

/// Nodal P1 values tied to the mesh they were computed on.
struct ScalarField {
  std::vector<double> values;
  std::uint64_t mesh_id = 0;

  static ScalarField zeros(const TriMesh& mesh);
  double operator[](int node) const { return values[static_cast<std::size_t>(node)]; }
};

/// Throws MeshMismatch unless the field lives on `mesh`.
void require_same_mesh(const ScalarField& field, const TriMesh& mesh);

/// Heat source f on the body, flux g per Neumann facet, temperature u_D per Dirichlet facet.
struct ProblemData {
  double f = 0.0;
  /// Optional per-bulk-triangle source; overrides `f` when non-empty.
  std::vector<double> f_per_triangle;
  std::map<int, double> g;
  std::map<int, double> u_D;

  /// Takes g and u_D from the facet values of the domain.
  static ProblemData from_domain(const PolygonalDomain& domain, double f = 0.0);
  /// Throws UnknownLabel when g or u_D reference facets with a different label.
  void validate(const PolygonalDomain& domain) const;
  double source_on(int triangle) const;
};

struct RegionCoefficients {
  double bulk = 1.0;
  double layer = 1.0;
};

/// P1 stiffness with a piecewise-constant coefficient per region (coefficients >= 0).
SparseMatrix assemble_stiffness(const TriMesh& mesh, RegionCoefficients coeff);
/// P1 consistent mass with a coefficient per region.
SparseMatrix assemble_mass(const TriMesh& mesh, RegionCoefficients coeff);

/// Weight at the point xi in [0, 1] along the edge from a to b.
using EdgeWeight = std::function<double(const BoundaryEdge& edge, double xi)>;

/// Consistent boundary mass with the weight sampled at 3 Gauss points per edge.
/// Throws NonpositiveWeight when the weight is not positive at a Gauss point.
SparseMatrix assemble_boundary_mass(const TriMesh& mesh, std::span<const BoundaryEdge> edges, const EdgeWeight& weight);
/// Row sums of the consistent boundary mass, as a nodal vector.
std::vector<double> assemble_boundary_mass_lumped(const TriMesh& mesh, std::span<const BoundaryEdge> edges,
                                                  const EdgeWeight& weight);

std::vector<double> assemble_load(const TriMesh& mesh, const ProblemData& data);
std::vector<double> assemble_neumann(const TriMesh& mesh, const ProblemData& data);

/// Dirichlet nodes from the Dirichlet facet edges; at a vertex shared by two Dirichlet
/// facets the lower facet index wins.
std::map<int, double> dirichlet_constraints(const TriMesh& mesh, const ProblemData& data);

struct LinearSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
  std::map<int, double> constraints;
};

/// System restricted to the free nodes by symmetric elimination.
struct ReducedSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
  std::vector<int> free_nodes;
  std::vector<int> free_index;  // node -> free row, -1 when constrained
  std::vector<double> lifted;   // full-length vector holding the constrained values

  std::vector<double> expand(std::span<const double> free_values) const;
  std::vector<double> restrict_to_free(std::span<const double> full) const;
};

ReducedSystem apply_dirichlet(const LinearSystem& system);

struct CgOptions {
  double tol = 1e-10;
  int max_iter = 0;  // 0: 10 n
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients. Throws NoConvergence at the iteration cap
/// or on breakdown (non-positive curvature).
CgResult conjugate_gradient(const SparseMatrix& a, std::span<const double> b, const CgOptions& options,
                            std::span<const double> x0 = {});

/// y = A x for a symmetric positive-definite operator.
using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

/// Matrix-free variant; `diagonal` feeds the Jacobi preconditioner.
CgResult conjugate_gradient(const LinearOperator& a, std::span<const double> diagonal, std::span<const double> b,
                            const CgOptions& options, std::span<const double> x0 = {});

ScalarField solve_spd(const LinearSystem& system, const CgOptions& options, const TriMesh& mesh);

/// 0.5 * u^T A u
double quadratic_form(const SparseMatrix& a, std::span<const double> u);
double dot_product(std::span<const double> a, std::span<const double> b);

/// Lumped L1 norm of the trace on the insulated sides: sum_j w_j |v_j|.
double boundary_l1(const ScalarField& v, const TriMesh& mesh, const InsulatedTrace& trace);

}  // namespace insulation
