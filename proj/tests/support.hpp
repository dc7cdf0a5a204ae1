#pragma once

#include <array>
#include <chrono>
#include <vector>

#include "insulation/geometry.hpp"
#include "insulation/mesh.hpp"

namespace testing_support {

using insulation::FacetLabel;
using insulation::FacetSpec;
using insulation::PolygonalDomain;
using insulation::Vec2;

inline std::vector<FacetSpec> facets(const std::vector<std::pair<FacetLabel, double>>& labels) {
  std::vector<FacetSpec> out;
  const int n = static_cast<int>(labels.size());
  for (int i = 0; i < n; ++i) out.push_back({{i, (i + 1) % n}, labels[static_cast<std::size_t>(i)].first, labels[static_cast<std::size_t>(i)].second});
  return out;
}

inline PolygonalDomain unit_square(FacetLabel bottom, FacetLabel right, FacetLabel top, FacetLabel left) {
  return {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, facets({{bottom, 0.0}, {right, 0.0}, {top, 0.0}, {left, 0.0}})};
}

inline PolygonalDomain insulated_square() {
  return unit_square(FacetLabel::Insulated, FacetLabel::Insulated, FacetLabel::Insulated, FacetLabel::Insulated);
}

/// Dirichlet u_D = 1 on the left, insulated right side, flux-free top and bottom.
inline PolygonalDomain pseudo_1d() {
  return {{{0, 0}, {1, 0}, {1, 1}, {0, 1}},
          facets({{FacetLabel::Neumann, 0.0}, {FacetLabel::Insulated, 0.0}, {FacetLabel::Neumann, 0.0},
                  {FacetLabel::Dirichlet, 1.0}})};
}

/// Unit square minus its upper right quarter, reentrant corner at (0.5, 0.5).
inline PolygonalDomain l_shape(FacetLabel label = FacetLabel::Insulated) {
  std::vector<std::pair<FacetLabel, double>> labels(6, {label, 0.0});
  return {{{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}}, facets(labels)};
}

/// Rectangle with a slot cut into its top side; the slot walls face each other.
inline PolygonalDomain notched() {
  std::vector<std::pair<FacetLabel, double>> labels(8, {FacetLabel::Insulated, 0.0});
  return {{{0, 0}, {3, 0}, {3, 2}, {2, 2}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}, facets(labels)};
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace testing_support
