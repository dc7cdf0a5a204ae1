#pragma once

#include <string_view>
#include <vector>

#include "insulation/energy.hpp"

namespace insulation {

enum class ReducedMethod { ProxGrad, Alternating };

std::string_view to_string(ReducedMethod method);
ReducedMethod reduced_method_from_string(std::string_view text);

struct ReducedOptions {
  ReducedMethod method = ReducedMethod::ProxGrad;
  double tol = 1e-10;
  int max_iter = 0;  // 0: 200000 proximal steps or 1000 alternating sweeps
  CgOptions cg;
};

struct ReducedSolution {
  ScalarField u;
  EnergyReport energy;
  int iterations = 0;
  /// ProxGrad: certified subgradient residual relative to the load.
  double residual = 0.0;
  /// ProxGrad: objective after every accepted step (starting at x = 0).
  /// Alternating: reduced energy after every sweep.
  std::vector<double> history;
  double lipschitz = 0.0;
};

/// Minimizes 0.5 |grad v|^2 + (1/2m) ||v||_1^2 - (f, v) - <g, v> with u_D eliminated.
/// A vanishing trace is not an error here: u and the warning "ZeroTrace" are returned.
ReducedSolution solve_reduced(const TriMesh& mesh, const TransversalField& field, double mass,
                              const ProblemData& data, const ReducedOptions& options = {});

}  // namespace insulation
