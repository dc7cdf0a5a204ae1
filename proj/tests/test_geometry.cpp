#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "insulation/distribution.hpp"
#include "insulation/error.hpp"
#include "insulation/geometry.hpp"
#include "support.hpp"

using namespace insulation;

namespace {

const double kHalfRoot2 = std::sqrt(0.5);

TransversalField square_bisector() {
  return TransversalField::build(testing_support::insulated_square(), FieldMode::Bisector);
}

void expect_near(const Vec2& a, const Vec2& b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
}

}  // namespace

TEST(TransversalField, SquareCornersAreOutwardDiagonals) {
  const TransversalField k = square_bisector();
  expect_near(k.vertex_vector(0), {-kHalfRoot2, -kHalfRoot2}, 1e-15);
  expect_near(k.vertex_vector(1), {kHalfRoot2, -kHalfRoot2}, 1e-15);
  expect_near(k.vertex_vector(2), {kHalfRoot2, kHalfRoot2}, 1e-15);
  expect_near(k.vertex_vector(3), {-kHalfRoot2, kHalfRoot2}, 1e-15);
  for (int f = 0; f < 4; ++f) expect_near(k.at({f, 0.5}), k.domain().facet(f).normal, 1e-15);
}

TEST(TransversalField, SquareKappaAttainedAtCorners) {
  const TransversalField k = square_bisector();
  EXPECT_NEAR(k.kappa(), kHalfRoot2, 1e-12);
  EXPECT_NEAR(k.k_dot_n({0, 0.0}), kHalfRoot2, 1e-15);
}

TEST(TransversalField, FacetNormalOnIsolatedFacet) {
  const auto domain = testing_support::unit_square(FacetLabel::Neumann, FacetLabel::Insulated, FacetLabel::Neumann,
                                                   FacetLabel::Dirichlet);
  const TransversalField k = TransversalField::build(domain, FieldMode::FacetNormal);
  EXPECT_DOUBLE_EQ(k.kappa(), 1.0);
  for (double s : {0.0, 0.3, 1.0}) expect_near(k.at({1, s}), {1.0, 0.0}, 0.0);
  EXPECT_FALSE(k.defined_on(0));
}

TEST(TransversalField, FacetNormalRejectsAdjacentInsulatedFacets) {
  try {
    TransversalField::build(testing_support::insulated_square(), FieldMode::FacetNormal);
    FAIL() << "expected ModeInvalid";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ModeInvalid);
  }
}

TEST(TransversalField, CuspRaisesTransversalityFailure) {
  // A needle tip: the two sides meet at an angle so sharp that k.n collapses.
  std::vector<std::pair<FacetLabel, double>> labels(3, {FacetLabel::Insulated, 0.0});
  const PolygonalDomain needle({{0, 0}, {1, 0}, {-1e6, 1e-7}}, testing_support::facets(labels));
  try {
    TransversalField::build(needle, FieldMode::Bisector);
    FAIL() << "expected TransversalityFailure";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TransversalityFailure);
  }
}

TEST(TransversalField, UnitLengthTransversalAndContinuous) {
  const TransversalField k = TransversalField::build(testing_support::l_shape(), FieldMode::Bisector);
  for (int f = 0; f < 6; ++f) {
    for (int i = 0; i <= 64; ++i) {
      const BoundaryPoint p{f, i / 64.0};
      EXPECT_NEAR(norm(k.at(p)), 1.0, 1e-14);
      EXPECT_GE(k.k_dot_n(p), k.kappa() - 1e-15);
    }
    expect_near(k.at({f, 1.0}), k.at({(f + 1) % 6, 0.0}), 1e-15);
  }
}

TEST(LayerPoint, Examples) {
  const TransversalField k = square_bisector();
  const Vec2 below = layer_point(k, {0, 0.5}, 0.1);
  expect_near(below, {0.5, -0.1}, 1e-15);
  expect_near(layer_point(k, {0, 0.3}, 0.0), {0.3, 0.0}, 0.0);
  expect_near(layer_point(k, {1, 0.0}, 0.2), {1.0 + 0.1 * std::sqrt(2.0), -0.1 * std::sqrt(2.0)}, 1e-15);
}

TEST(LayerJacobian, FlatFacetNormalFieldIsOne) {
  const auto domain = testing_support::unit_square(FacetLabel::Neumann, FacetLabel::Insulated, FacetLabel::Neumann,
                                                   FacetLabel::Dirichlet);
  const TransversalField k = TransversalField::build(domain, FieldMode::FacetNormal);
  for (double t : {0.0, 0.1, 0.7}) EXPECT_DOUBLE_EQ(layer_jacobian(k, {1, 0.4}, t), 1.0);
}

TEST(LayerJacobian, ZeroOffsetEqualsKDotN) {
  const TransversalField k = TransversalField::build(testing_support::l_shape(), FieldMode::Bisector);
  for (int f = 0; f < 6; ++f) {
    for (double s : {0.0, 0.1, 0.5, 0.9}) EXPECT_NEAR(layer_jacobian(k, {f, s}, 0.0), k.k_dot_n({f, s}), 1e-15);
  }
}

TEST(LayerJacobian, MatchesFiniteDifferenceDeterminant) {
  const TransversalField k = square_bisector();
  for (double s : {0.5, 0.2, 0.85}) {
    const double t = 0.1;
    const double len = k.domain().facet(0).length;
    const double hs = 1e-6;
    const double ht = 1e-6;
    const Vec2 ds = (layer_point(k, {0, s + hs}, t) - layer_point(k, {0, s - hs}, t)) * (1.0 / (2 * hs * len));
    const Vec2 dt = (layer_point(k, {0, s}, t + ht) - layer_point(k, {0, s}, t - ht)) * (1.0 / (2 * ht));
    // orientation: arc length runs counter-clockwise, the offset points outward
    EXPECT_NEAR(layer_jacobian(k, {0, s}, t), cross(dt, ds), 1e-6);
  }
}

TEST(LayerArea, FlatFacetIsRectangle) {
  const auto domain = testing_support::unit_square(FacetLabel::Neumann, FacetLabel::Insulated, FacetLabel::Neumann,
                                                   FacetLabel::Dirichlet);
  const TransversalField k = TransversalField::build(domain, FieldMode::FacetNormal);
  for (double c : {0.5, 2.0}) {
    const auto d = InsulationDistribution::constant(k, c);
    EXPECT_NEAR(layer_area(k, d, 0.1), 0.1 * c, 1e-15);
  }
  EXPECT_EQ(layer_area(k, InsulationDistribution::constant(k, 0.0), 0.1), 0.0);
}

TEST(LayerArea, SquareMatchesClosedForm) {
  // Along a side k.n = 1 / sqrt(u^2 + 1), u in [-1, 1], so the weighted integral is
  // 4 asinh(1); k turns once around, adding pi t^2 to the swept area.
  const TransversalField k = square_bisector();
  const auto d = InsulationDistribution::constant(k, 1.0);
  const double limit = 4.0 * std::asinh(1.0);
  EXPECT_NEAR(weighted_thickness_integral(k, d), limit, 1e-8);
  for (double eps : {0.1, 0.02}) EXPECT_NEAR(layer_area(k, d, eps), eps * limit + std::numbers::pi * eps * eps, 1e-8);
}

TEST(Distribution, MassAndFloor) {
  const TransversalField k = square_bisector();
  const auto d = InsulationDistribution::constant(k, 2.0);
  EXPECT_NEAR(d.recompute_mass(k), d.mass(), 1e-12 * d.mass());
  EXPECT_NEAR(d.scaled(k, 0.5).mass(), 0.5 * d.mass(), 1e-14);
  try {
    InsulationDistribution::constant(k, 0.5, 1.0);
    FAIL() << "floor violation accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidDistribution);
  }
}

TEST(Domain, RejectsClockwisePolygon) {
  std::vector<std::pair<FacetLabel, double>> labels(4, {FacetLabel::Insulated, 0.0});
  EXPECT_THROW(PolygonalDomain({{0, 0}, {0, 1}, {1, 1}, {1, 0}}, testing_support::facets(labels)), Error);
}
