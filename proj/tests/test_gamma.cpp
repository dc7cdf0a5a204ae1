#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "insulation/error.hpp"
#include "insulation/gamma.hpp"
#include "insulation/solver_robin.hpp"
#include "support.hpp"

using namespace insulation;

namespace {

TransversalField pseudo_field() { return TransversalField::build(testing_support::pseudo_1d(), FieldMode::FacetNormal); }

GammaOptions options(double h) {
  GammaOptions o;
  o.h = h;
  o.n_t = 4;
  o.cg.tol = 1e-13;
  return o;
}

}  // namespace

TEST(Recovery, CutoffAlongFibers) {
  const double c = 1.0;
  const TransversalField field = pseudo_field();
  const auto d = InsulationDistribution::constant(field, 1.0);
  const TriMesh bulk = triangulate_bulk(field.domain(), 0.25);
  const LimitSolution sol = solve_limit(bulk, field, d, ProblemData::from_domain(field.domain()));
  const TriMesh glued = extrude_layer(bulk, field, d, 0.1, 2);
  const ScalarField r = recovery_sequence(sol.u, bulk, glued);
  for (int i = 0; i < bulk.node_count(); ++i) EXPECT_EQ(r[i], sol.u[i]);
  for (const auto& fiber : glued.fibers) {
    ASSERT_EQ(fiber.nodes.size(), 3u);
    EXPECT_EQ(r[fiber.nodes[0]], sol.u[fiber.base]);
    EXPECT_NEAR(r[fiber.nodes[1]], 0.5 * sol.u[fiber.base], 1e-15);
    EXPECT_EQ(r[fiber.nodes[2]], 0.0);
    EXPECT_NEAR(sol.u[fiber.base], c / (1.0 + c), 1e-10);
  }
  const TriMesh other = triangulate_bulk(field.domain(), 0.125);
  EXPECT_THROW(recovery_sequence(ScalarField::zeros(other), other, glued), Error);
}

TEST(GammaSweep, PseudoOneDimensionalGapsVanish) {
  for (double c : {1.0, 2.0}) {
    const TransversalField field = pseudo_field();
    const auto d = InsulationDistribution::constant(field, c);
    const std::vector<double> eps{0.2, 0.1, 0.05};
    const GammaSweepReport report = gamma_sweep(field, d, ProblemData::from_domain(field.domain()), eps, options(1.0 / 16));
    EXPECT_NEAR(report.level.limit_energy, 1.0 / (2.0 * (1.0 + c)), 1e-12);
    EXPECT_NEAR(report.weighted_integral, c, 1e-14);
    ASSERT_EQ(report.level.rows.size(), 3u);
    for (const auto& row : report.level.rows) {
      EXPECT_LE(row.gap_eps, 1e-9);
      EXPECT_TRUE(row.sandwich);
      EXPECT_NEAR(row.area_over_eps, c, 1e-12);
    }
    EXPECT_TRUE(report.level.sandwich_ok());
    EXPECT_TRUE(report.level.gaps_decrease());
    EXPECT_FALSE(report.refined.has_value());
    EXPECT_TRUE(std::isnan(report.level.rows.front().order_eps));
  }
}

TEST(GammaSweep, LShapeSandwichAndCoercivity) {
  const TransversalField field = TransversalField::build(testing_support::l_shape(), FieldMode::Bisector);
  const auto d = InsulationDistribution::constant(field, 1.0);
  const std::vector<double> eps{0.1, 0.05, 0.025};
  GammaOptions o = options(1.0 / 16);
  o.refine_check = true;
  const GammaSweepReport report = gamma_sweep(field, d, ProblemData::from_domain(field.domain(), 1.0), eps, o);
  ASSERT_TRUE(report.refined.has_value());
  for (const GammaLevel* level : {&report.level, &*report.refined}) {
    EXPECT_TRUE(level->sandwich_ok());
    EXPECT_TRUE(level->coercivity_bounded());
    EXPECT_EQ(level->poincare_failures(), 0);
    for (const auto& row : level->rows) {
      EXPECT_LE(row.energy_eps, row.energy_recovery);
      // the layer only adds admissible competitors near the limit: E_eps below E
      EXPECT_LT(row.energy_eps, level->limit_energy);
    }
  }
  EXPECT_GT(report.refined->nodes, report.level.nodes);
}

TEST(GammaSweep, InvalidLists) {
  const TransversalField field = pseudo_field();
  const auto d = InsulationDistribution::constant(field, 1.0);
  const auto data = ProblemData::from_domain(field.domain());
  for (const std::vector<double>& eps : {std::vector<double>{}, std::vector<double>{0.1, 0.2}, std::vector<double>{0.1, -0.05}}) {
    try {
      gamma_sweep(field, d, data, eps, options(0.25));
      FAIL() << "expected SchemaError";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::SchemaError);
      EXPECT_NE(std::string(e.what()).find("epsilon_list"), std::string::npos);
    }
  }
}

TEST(GammaSweep, ThickLayerIsNonInjective) {
  const TransversalField field = TransversalField::build(testing_support::notched(), FieldMode::Bisector);
  const auto d = InsulationDistribution::constant(field, 1.0);
  const std::vector<double> eps{0.8, 0.1};
  try {
    gamma_sweep(field, d, ProblemData::from_domain(field.domain(), 1.0), eps, options(0.25));
    FAIL() << "expected NonInjectiveLayer";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonInjectiveLayer);
  }
}

TEST(Lebesgue, MeasureConvergenceOnSquare) {
  const TransversalField field = TransversalField::build(testing_support::insulated_square(), FieldMode::Bisector);
  const auto d = InsulationDistribution::constant(field, 1.0);
  const TriMesh glued = extrude_layer(triangulate_bulk(field.domain(), 0.125), field, d, 0.1, 4);
  ScalarField ones = ScalarField::zeros(glued);
  std::fill(ones.values.begin(), ones.values.end(), 1.0);
  const std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
  const LebesgueReport r = lebesgue_limit_check(ones, glued, [](const BoundaryPoint&) { return 1.0; }, d, field, eps, 1);
  EXPECT_TRUE(r.converged);
  EXPECT_GE(r.min_order, 0.9);
  for (const auto& row : r.rows) {
    EXPECT_NEAR(row.limit, 4.0 * std::asinh(1.0), 1e-8);
    // the layer is wider than its flat projection, by pi eps^2 in area
    EXPECT_NEAR(row.layer_value - row.limit, std::numbers::pi * row.eps, 1e-8);
  }
}

TEST(Lebesgue, ZeroFieldAndFiberConstantField) {
  const TransversalField field = pseudo_field();
  const auto d = InsulationDistribution::constant(field, 1.0);
  const TriMesh glued = extrude_layer(triangulate_bulk(field.domain(), 0.125), field, d, 0.2, 3);
  const std::vector<double> eps{0.2, 0.1, 0.05};
  const auto weight = [](const BoundaryPoint& p) { return 1.0 + p.lambda; };
  const LebesgueReport zero = lebesgue_limit_check(ScalarField::zeros(glued), glued, weight, d, field, eps, 2);
  for (const auto& row : zero.rows) {
    EXPECT_EQ(row.layer_value, 0.0);
    EXPECT_EQ(row.limit, 0.0);
  }
  ScalarField v = ScalarField::zeros(glued);
  for (int i = 0; i < glued.node_count(); ++i) {
    const double y = glued.nodes[static_cast<std::size_t>(i)].y;
    v.values[static_cast<std::size_t>(i)] = y * y - 0.4;
  }
  for (int p : {1, 2}) {
    const LebesgueReport r = lebesgue_limit_check(v, glued, [](const BoundaryPoint&) { return 1.0; }, d, field, eps, p);
    for (const auto& row : r.rows) EXPECT_NEAR(row.layer_value, row.limit, 1e-13);
    EXPECT_TRUE(r.converged);
  }
  EXPECT_THROW(lebesgue_limit_check(v, glued, weight, d, field, std::vector<double>{0.4}, 1), Error);
}
