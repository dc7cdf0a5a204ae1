#pragma once

#include "insulation/energy.hpp"

namespace insulation {

/// Per-fiber check of |u(t_l)|^2 <= (T - t_l) * sum_{m >= l} |grad u|^2 dt along every
/// layer fiber, with a relative slack.
struct PoincareDiagnostic {
  int fibers_checked = 0;
  int failures = 0;
  double max_ratio = 0.0;  // worst lhs / rhs over all fiber nodes with rhs > 0
  double slack = 0.05;
};

/// ||u||^2_body + ||grad u||^2_body + (1/eps) ||u||^2_layer + eps ||grad u||^2_layer
double coercivity_norm(const ScalarField& u, const TriMesh& glued);

PoincareDiagnostic poincare_diagnostic(const ScalarField& u, const TriMesh& glued, double slack = 0.05);

struct EpsOptions {
  CgOptions cg;
};

struct EpsSolution {
  ScalarField u;
  EnergyReport energy;
  int iterations = 0;
  double relative_residual = 0.0;
  PoincareDiagnostic poincare;
  double coercivity = 0.0;
};

/// Transmission problem on the glued mesh: coefficient 1 in the body and eps in the
/// layer, u = 0 on the outer layer boundary. `eps` must match the extrusion.
EpsSolution solve_eps(const TriMesh& glued, double eps, const ProblemData& data, const EpsOptions& options = {});

}  // namespace insulation
