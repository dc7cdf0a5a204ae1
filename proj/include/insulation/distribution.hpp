#pragma once

#include <span>
#include <vector>

#include "insulation/geometry.hpp"

namespace insulation {

struct ThicknessKnot {
  double lambda = 0.0;
  double value = 0.0;
};

/// Piecewise-linear thickness profile d along k on the insulated sides.
///
/// Every insulated facet carries its own sorted knot list that starts at lambda = 0 and
/// ends at lambda = 1; values at a vertex shared by two insulated facets must agree. The
/// stored mass is the trapezoidal (lumped) value of the integral of (k.n) d, which is
/// the discrete rule used everywhere the mass constraint is enforced.
class InsulationDistribution {
 public:
  static InsulationDistribution constant(const TransversalField& field, double value, double d_min = 0.0);
  /// `knots[f]` is ignored for non-insulated facets.
  static InsulationDistribution from_knots(const TransversalField& field,
                                           std::vector<std::vector<ThicknessKnot>> knots,
                                           double d_min = 0.0);

  double at(const BoundaryPoint& p) const;
  std::span<const ThicknessKnot> knots(int facet) const;
  double mass() const { return mass_; }
  double d_min() const { return d_min_; }
  double max_value() const;
  /// Lumped mass recomputed from the stored knots.
  double recompute_mass(const TransversalField& field) const;
  /// True when every knot on the facet is zero.
  bool vanishes_on(int facet) const;

  /// Rescales the profile by a positive factor, keeping the floor consistent.
  InsulationDistribution scaled(const TransversalField& field, double factor) const;

 private:
  InsulationDistribution() = default;

  std::vector<std::vector<ThicknessKnot>> knots_;
  double mass_ = 0.0;
  double d_min_ = 0.0;
};

}  // namespace insulation
