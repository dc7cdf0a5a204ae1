#include "insulation/solver_robin.hpp"

#include "insulation/error.hpp"

namespace insulation {

LimitSolution solve_limit(const TriMesh& mesh, const TransversalField& field, const InsulationDistribution& d,
                          const ProblemData& data, const RobinOptions& options) {
  if (mesh.has_layer()) throw Error(ErrorKind::MeshMismatch, "the limit problem needs a bulk mesh");
  data.validate(field.domain());

  LinearSystem system;
  const SparseMatrix stiffness = assemble_stiffness(mesh, {1.0, 0.0});
  system.constraints = dirichlet_constraints(mesh, data);
  if (options.quadrature == RobinQuadrature::Consistent) {
    const auto edges = insulated_edges(mesh);
    system.matrix = stiffness.plus(assemble_boundary_mass(mesh, edges, robin_weight(field, d)));
  } else {
    const InsulatedTrace trace = insulated_trace(mesh, field);
    const auto r = lumped_robin_weights(trace, d);
    std::vector<double> diag(static_cast<std::size_t>(mesh.node_count()), 0.0);
    for (int j = 0; j < trace.size(); ++j) {
      const int node = trace.nodes[static_cast<std::size_t>(j)];
      if (r[static_cast<std::size_t>(j)] > 0.0) {
        diag[static_cast<std::size_t>(node)] = r[static_cast<std::size_t>(j)];
      } else if (options.clamp_bare_nodes) {
        system.constraints.emplace(node, 0.0);
      } else {
        throw Error(ErrorKind::NonpositiveWeight, "(k.n) d vanishes at node " + std::to_string(node));
      }
    }
    system.matrix = stiffness.plus(SparseMatrix::diagonal_matrix(diag));
  }
  system.rhs = assemble_load(mesh, data);
  const auto neumann = assemble_neumann(mesh, data);
  for (std::size_t i = 0; i < system.rhs.size(); ++i) system.rhs[i] += neumann[i];

  const ReducedSystem red = apply_dirichlet(system);
  const CgResult cg = conjugate_gradient(red.matrix, red.rhs, options.cg);
  LimitSolution out;
  out.u = {red.expand(cg.x), mesh.id};
  out.iterations = cg.iterations;
  out.relative_residual = cg.relative_residual;
  out.energy = eval_E_limit(out.u, mesh, field, d, data, options.quadrature);
  return out;
}

}  // namespace insulation
