#pragma once

#include "insulation/energy.hpp"

namespace insulation {

struct RobinOptions {
  RobinQuadrature quadrature = RobinQuadrature::Consistent;
  CgOptions cg;
  /// Lumped quadrature only: pin u = 0 at trace nodes where d = 0 instead of failing.
  bool clamp_bare_nodes = false;
};

struct LimitSolution {
  ScalarField u;
  EnergyReport energy;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Limit problem on a bulk mesh: stiffness plus the Robin boundary mass with weight
/// 1/((k.n) d), load and flux on the right, u_D eliminated.
LimitSolution solve_limit(const TriMesh& mesh, const TransversalField& field, const InsulationDistribution& d,
                          const ProblemData& data, const RobinOptions& options = {});

}  // namespace insulation
