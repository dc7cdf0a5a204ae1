#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "insulation/fem.hpp"

namespace insulation {

/// Quadrature of the Robin term on the insulated sides.
enum class RobinQuadrature { Consistent, Lumped };

std::string_view to_string(RobinQuadrature q);
RobinQuadrature robin_quadrature_from_string(std::string_view text);

/// Decomposed value of one energy functional. Terms are signed contributions, so
/// `total` is their sum; it is +inf when the field violates a hard constraint.
struct EnergyReport {
  std::string functional;
  std::vector<std::pair<std::string, double>> terms;
  double total = 0.0;
  std::vector<std::string> warnings;

  /// Throws std::out_of_range for a missing term.
  double term(std::string_view name) const;
};

/// Polygon edges of the mesh on insulated facets.
std::vector<BoundaryEdge> insulated_edges(const TriMesh& mesh);

/// 1 / ((k.n) d) at a point of an insulated edge.
EdgeWeight robin_weight(const TransversalField& field, const InsulationDistribution& d);

/// Hard constraints of the thin-layer problem: u_D on Dirichlet nodes, zero on the outer
/// layer boundary and on insulated sides left bare.
std::map<int, double> eps_constraints(const TriMesh& glued, const ProblemData& data);

/// Nodal Robin weights w_j / ((k.n)_j d_j) on the trace; zero where d_j = 0.
std::vector<double> lumped_robin_weights(const InsulatedTrace& trace, const InsulationDistribution& d);

/// Limit energy: GRADIENT, INTERFACE, SOURCE, NEUMANN.
EnergyReport eval_E_limit(const ScalarField& u, const TriMesh& mesh, const TransversalField& field,
                          const InsulationDistribution& d, const ProblemData& data,
                          RobinQuadrature quadrature = RobinQuadrature::Consistent);

/// Thin-layer energy on a glued mesh: GRADIENT_BULK, GRADIENT_LAYER, SOURCE, NEUMANN.
EnergyReport eval_E_eps(const ScalarField& u, const TriMesh& glued, const ProblemData& data);

/// Reduced energy: GRADIENT, L1_SQUARED, SOURCE, NEUMANN.
EnergyReport eval_I(const ScalarField& u, const TriMesh& mesh, const TransversalField& field, double mass,
                    const ProblemData& data);

}  // namespace insulation
