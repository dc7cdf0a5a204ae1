#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "insulation/energy.hpp"

namespace insulation {

/// Constant-along-fiber extension of a body field cut off linearly across the layer:
/// a layer node at level i of n_t gets u(base) (1 - i / n_t).
ScalarField recovery_sequence(const ScalarField& u, const TriMesh& bulk, const TriMesh& glued);

struct GammaRow {
  double eps = 0.0;
  double energy_eps = 0.0;       // E_eps(u_eps)
  double energy_recovery = 0.0;  // E_eps(recovery)
  double coercivity = 0.0;
  double area_over_eps = 0.0;    // |layer| / eps
  int poincare_failures = 0;
  double poincare_max_ratio = 0.0;
  bool sandwich = false;         // E_eps(u_eps) <= E_eps(recovery)
  double gap_eps = 0.0;          // |E_eps(u_eps) - E(u)|
  double gap_recovery = 0.0;     // |E_eps(recovery) - E(u)|
  double order_eps = 0.0;        // NaN on the first row
  double order_recovery = 0.0;
};

struct GammaLevel {
  double h = 0.0;
  int nodes = 0;
  double limit_energy = 0.0;  // E(u)
  std::vector<GammaRow> rows;

  bool sandwich_ok() const;
  /// Every coercivity value at most 10 times the one at the largest eps.
  bool coercivity_bounded() const;
  bool gaps_decrease() const;
  int poincare_failures() const;
};

struct GammaSweepReport {
  double weighted_integral = 0.0;  // integral of (k.n) d
  GammaLevel level;
  std::optional<GammaLevel> refined;  // same sweep at h / 2
};

struct GammaOptions {
  double h = 0.0625;
  int n_t = 4;
  bool refine_check = false;
  RobinQuadrature quadrature = RobinQuadrature::Consistent;
  CgOptions cg;
};

/// Throws SchemaError unless the list is non-empty, positive and strictly decreasing.
void validate_epsilon_list(std::span<const double> eps_list);

GammaSweepReport gamma_sweep(const TransversalField& field, const InsulationDistribution& d, const ProblemData& data,
                             std::span<const double> eps_list, const GammaOptions& options);

using BoundaryWeight = std::function<double(const BoundaryPoint&)>;

struct LebesgueRow {
  double eps = 0.0;
  double layer_value = 0.0;  // (1/eps) integral over the layer of a |v|^p
  double limit = 0.0;        // integral over the insulated sides of (k.n) d a |v|^p
  double error = 0.0;
  double order = 0.0;        // NaN on the first row
};

struct LebesgueReport {
  std::vector<LebesgueRow> rows;
  /// Smallest observed order among rows whose error is not at round-off level; NaN if none.
  double min_order = 0.0;
  bool converged = false;  // errors at round-off level, or every order >= 0.9
};

/// v lives on a glued mesh extruded with eps_0 >= every entry of `eps_list`; the layers of
/// the smaller thicknesses are integrated in fiber coordinates.
LebesgueReport lebesgue_limit_check(const ScalarField& v, const TriMesh& glued, const BoundaryWeight& a,
                                    const InsulationDistribution& d, const TransversalField& field,
                                    std::span<const double> eps_list, int p);

}  // namespace insulation
