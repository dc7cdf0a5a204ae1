#include "insulation/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "insulation/error.hpp"

namespace insulation {

namespace {

double lumped_mass(const TransversalField& field, const std::vector<std::vector<ThicknessKnot>>& knots) {
  const auto& domain = field.domain();
  double mass = 0.0;
  for (int fi = 0; fi < domain.size(); ++fi) {
    const Facet& facet = domain.facet(fi);
    if (facet.label != FacetLabel::Insulated) continue;
    const auto& ks = knots[static_cast<std::size_t>(fi)];
    for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
      const double half = 0.5 * (ks[i + 1].lambda - ks[i].lambda) * facet.length;
      mass += half * (field.k_dot_n({fi, ks[i].lambda}) * ks[i].value +
                      field.k_dot_n({fi, ks[i + 1].lambda}) * ks[i + 1].value);
    }
  }
  return mass;
}

}  // namespace

InsulationDistribution InsulationDistribution::constant(const TransversalField& field, double value, double d_min) {
  std::vector<std::vector<ThicknessKnot>> knots(static_cast<std::size_t>(field.domain().size()));
  for (int fi = 0; fi < field.domain().size(); ++fi) {
    if (field.domain().facet(fi).label == FacetLabel::Insulated) {
      knots[static_cast<std::size_t>(fi)] = {{0.0, value}, {1.0, value}};
    }
  }
  return from_knots(field, std::move(knots), d_min);
}

InsulationDistribution InsulationDistribution::from_knots(const TransversalField& field,
                                                          std::vector<std::vector<ThicknessKnot>> knots,
                                                          double d_min) {
  const auto& domain = field.domain();
  if (static_cast<int>(knots.size()) != domain.size()) {
    throw Error(ErrorKind::InvalidDistribution, "expected one knot list per facet");
  }
  if (!(d_min >= 0.0) || !std::isfinite(d_min)) throw Error(ErrorKind::InvalidDistribution, "d_min must be >= 0");

  for (int fi = 0; fi < domain.size(); ++fi) {
    auto& ks = knots[static_cast<std::size_t>(fi)];
    if (domain.facet(fi).label != FacetLabel::Insulated) {
      ks.clear();
      continue;
    }
    if (ks.size() < 2 || ks.front().lambda != 0.0 || ks.back().lambda != 1.0) {
      throw Error(ErrorKind::InvalidDistribution, "facet " + std::to_string(fi) + " knots must span [0, 1]");
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (!std::isfinite(ks[i].value) || ks[i].value < 0.0) {
        throw Error(ErrorKind::InvalidDistribution, "thickness must be finite and non-negative");
      }
      if (d_min > 0.0 && ks[i].value < d_min) {
        throw Error(ErrorKind::InvalidDistribution, "thickness " + std::to_string(ks[i].value) +
                                                        " below floor d_min = " + std::to_string(d_min));
      }
      if (i > 0 && !(ks[i].lambda > ks[i - 1].lambda)) {
        throw Error(ErrorKind::InvalidDistribution, "knots must be strictly increasing in lambda");
      }
    }
  }

  // continuity at vertices shared by two insulated facets
  for (int v = 0; v < domain.size(); ++v) {
    const int before = domain.facet_ending_at(v);
    const int after = domain.facet_starting_at(v);
    if (domain.facet(before).label != FacetLabel::Insulated || domain.facet(after).label != FacetLabel::Insulated) continue;
    const double a = knots[static_cast<std::size_t>(before)].back().value;
    const double b = knots[static_cast<std::size_t>(after)].front().value;
    if (std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)})) {
      throw Error(ErrorKind::InvalidDistribution, "thickness is discontinuous at vertex " + std::to_string(v));
    }
  }

  InsulationDistribution d;
  d.mass_ = lumped_mass(field, knots);
  d.knots_ = std::move(knots);
  d.d_min_ = d_min;
  return d;
}

double InsulationDistribution::at(const BoundaryPoint& p) const {
  const auto& ks = knots_.at(static_cast<std::size_t>(p.facet));
  if (ks.empty()) throw Error(ErrorKind::InvalidDistribution, "facet " + std::to_string(p.facet) + " is not insulated");
  const auto it = std::lower_bound(ks.begin(), ks.end(), p.lambda,
                                   [](const ThicknessKnot& k, double l) { return k.lambda < l; });
  if (it == ks.begin()) return ks.front().value;
  if (it == ks.end()) return ks.back().value;
  if (it->lambda == p.lambda) return it->value;
  const auto& left = *(it - 1);
  const double s = (p.lambda - left.lambda) / (it->lambda - left.lambda);
  return (1.0 - s) * left.value + s * it->value;
}

std::span<const ThicknessKnot> InsulationDistribution::knots(int facet) const {
  return knots_.at(static_cast<std::size_t>(facet));
}

double InsulationDistribution::max_value() const {
  double m = 0.0;
  for (const auto& ks : knots_) {
    for (const auto& k : ks) m = std::max(m, k.value);
  }
  return m;
}

double InsulationDistribution::recompute_mass(const TransversalField& field) const { return lumped_mass(field, knots_); }

bool InsulationDistribution::vanishes_on(int facet) const {
  const auto ks = knots(facet);
  return std::all_of(ks.begin(), ks.end(), [](const ThicknessKnot& k) { return k.value == 0.0; });
}

InsulationDistribution InsulationDistribution::scaled(const TransversalField& field, double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorKind::InvalidDistribution, "scale factor must be positive");
  auto knots = knots_;
  for (auto& ks : knots) {
    for (auto& k : ks) k.value *= factor;
  }
  return from_knots(field, std::move(knots), d_min_ * factor);
}

}  // namespace insulation
