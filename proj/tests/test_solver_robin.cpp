#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "insulation/error.hpp"
#include "insulation/solver_robin.hpp"
#include "support.hpp"

using namespace insulation;

namespace {

TransversalField pseudo_field(double u_left = 1.0) {
  const PolygonalDomain domain({{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                               testing_support::facets({{FacetLabel::Neumann, 0.0},
                                                        {FacetLabel::Insulated, 0.0},
                                                        {FacetLabel::Neumann, 0.0},
                                                        {FacetLabel::Dirichlet, u_left}}));
  return TransversalField::build(domain, FieldMode::FacetNormal);
}

int node_at(const TriMesh& mesh, Vec2 p) {
  for (int i = 0; i < mesh.node_count(); ++i) {
    if (norm(mesh.nodes[static_cast<std::size_t>(i)] - p) < 1e-12) return i;
  }
  return -1;
}

}  // namespace

TEST(SolveLimit, PseudoOneDimensionalIsExact) {
  for (double c : {0.5, 1.0, 2.0}) {
    const TransversalField field = pseudo_field();
    const TriMesh mesh = triangulate_bulk(field.domain(), 1.0 / 16);
    RobinOptions options;
    options.cg.tol = 1e-13;
    const LimitSolution sol =
        solve_limit(mesh, field, InsulationDistribution::constant(field, c), ProblemData::from_domain(field.domain()), options);
    for (int i = 0; i < mesh.node_count(); ++i) {
      EXPECT_NEAR(sol.u[i], 1.0 - mesh.nodes[static_cast<std::size_t>(i)].x / (1.0 + c), 1e-12);
    }
    EXPECT_NEAR(sol.energy.total, 1.0 / (2.0 * (1.0 + c)), 1e-12);
    EXPECT_NEAR(sol.energy.term("GRADIENT"), 0.5 / ((1.0 + c) * (1.0 + c)), 1e-12);
    EXPECT_LE(sol.relative_residual, options.cg.tol);
  }
}

TEST(SolveLimit, ZeroDataGivesZero) {
  const TransversalField field = pseudo_field(0.0);
  const TriMesh mesh = triangulate_bulk(field.domain(), 0.125);
  const LimitSolution sol = solve_limit(mesh, field, InsulationDistribution::constant(field, 1.0),
                                        ProblemData::from_domain(field.domain()));
  for (double v : sol.u.values) EXPECT_EQ(v, 0.0);
  for (const auto& [name, value] : sol.energy.terms) EXPECT_EQ(value, 0.0) << name;
}

TEST(SolveLimit, ThickInsulationDecouplesTheSide) {
  const TransversalField field = pseudo_field();
  const TriMesh mesh = triangulate_bulk(field.domain(), 0.125);
  const LimitSolution sol = solve_limit(mesh, field, InsulationDistribution::constant(field, 1e8),
                                        ProblemData::from_domain(field.domain()));
  EXPECT_LE(sol.energy.term("INTERFACE"), 1e-6);
  for (double v : sol.u.values) EXPECT_NEAR(v, 1.0, 1e-6);
}

TEST(SolveLimit, SquareSymmetry) {
  // Uniform red refinement keeps every diagonal parallel to (1, 1), so the mesh carries
  // the reflections about both diagonals exactly; the axis reflections hold up to the
  // discretization error, which must shrink under refinement.
  const TransversalField field = TransversalField::build(testing_support::insulated_square(), FieldMode::Bisector);
  const auto d = InsulationDistribution::constant(field, 0.5);
  const auto data = ProblemData::from_domain(field.domain(), 1.0);
  RobinOptions options;
  options.cg.tol = 1e-13;
  double previous_axis = 1e300;
  for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
    const TriMesh mesh = triangulate_bulk(field.domain(), h);
    const LimitSolution sol = solve_limit(mesh, field, d, data, options);
    double exact_group = 0.0;
    double axis = 0.0;
    for (int i = 0; i < mesh.node_count(); ++i) {
      const Vec2 p = mesh.nodes[static_cast<std::size_t>(i)];
      for (Vec2 q : {Vec2{p.y, p.x}, Vec2{1 - p.y, 1 - p.x}, Vec2{1 - p.x, 1 - p.y}}) {
        const int j = node_at(mesh, q);
        ASSERT_GE(j, 0);
        exact_group = std::max(exact_group, std::abs(sol.u[i] - sol.u[j]));
      }
      for (Vec2 q : {Vec2{1 - p.x, p.y}, Vec2{p.x, 1 - p.y}}) axis = std::max(axis, std::abs(sol.u[i] - sol.u[node_at(mesh, q)]));
    }
    EXPECT_LE(exact_group, 1e-11);
    EXPECT_LT(axis, 0.5 * previous_axis);
    previous_axis = axis;
  }
}

TEST(SolveLimit, DiscreteMinimality) {
  const PolygonalDomain mixed(testing_support::l_shape().vertices(),
                              testing_support::facets({{FacetLabel::Insulated, 0.0},
                                                       {FacetLabel::Insulated, 0.0},
                                                       {FacetLabel::Neumann, 0.5},
                                                       {FacetLabel::Insulated, 0.0},
                                                       {FacetLabel::Dirichlet, 0.3},
                                                       {FacetLabel::Insulated, 0.0}}));
  const TransversalField field = TransversalField::build(mixed, FieldMode::Bisector);
  const TriMesh mesh = triangulate_bulk(mixed, 1.0 / 16);
  const auto data = ProblemData::from_domain(mixed, 1.0);
  const auto d = InsulationDistribution::constant(field, 0.7);
  RobinOptions options;
  options.cg.tol = 1e-13;
  const LimitSolution sol = solve_limit(mesh, field, d, data, options);
  const auto fixed = dirichlet_constraints(mesh, data);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, 1e-2);
  for (int trial = 0; trial < 20; ++trial) {
    ScalarField v = sol.u;
    for (int i = 0; i < mesh.node_count(); ++i) {
      if (!fixed.count(i)) v.values[static_cast<std::size_t>(i)] += noise(rng);
    }
    EXPECT_LE(sol.energy.total, eval_E_limit(v, mesh, field, d, data).total);
  }
  // moving a Dirichlet value makes the energy infinite
  ScalarField bad = sol.u;
  bad.values[static_cast<std::size_t>(fixed.begin()->first)] += 1.0;
  EXPECT_TRUE(std::isinf(eval_E_limit(bad, mesh, field, d, data).total));
}

TEST(SolveLimit, RejectsLayeredMeshAndBareSides) {
  const TransversalField field = pseudo_field();
  const TriMesh bulk = triangulate_bulk(field.domain(), 0.25);
  const auto d = InsulationDistribution::constant(field, 1.0);
  const auto data = ProblemData::from_domain(field.domain());
  const TriMesh glued = extrude_layer(bulk, field, d, 0.1, 2);
  try {
    solve_limit(glued, field, d, data);
    FAIL() << "expected MeshMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MeshMismatch);
  }
  const auto zero = InsulationDistribution::constant(field, 0.0);
  try {
    solve_limit(bulk, field, zero, data);
    FAIL() << "expected NonpositiveWeight";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonpositiveWeight);
  }
  // lumped with clamping turns the bare side into a homogeneous Dirichlet side
  RobinOptions clamp;
  clamp.quadrature = RobinQuadrature::Lumped;
  clamp.clamp_bare_nodes = true;
  clamp.cg.tol = 1e-13;
  const LimitSolution sol = solve_limit(bulk, field, zero, data, clamp);
  for (int i = 0; i < bulk.node_count(); ++i) EXPECT_NEAR(sol.u[i], 1.0 - bulk.nodes[static_cast<std::size_t>(i)].x, 1e-12);
}

TEST(SolveLimit, LumpedAndConsistentConverge) {
  const TransversalField field = TransversalField::build(testing_support::insulated_square(), FieldMode::Bisector);
  const auto d = InsulationDistribution::constant(field, 1.0);
  const auto data = ProblemData::from_domain(field.domain(), 1.0);
  std::vector<double> gaps;
  for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
    const TriMesh mesh = triangulate_bulk(field.domain(), h);
    RobinOptions lumped;
    lumped.quadrature = RobinQuadrature::Lumped;
    gaps.push_back(std::abs(solve_limit(mesh, field, d, data).energy.total - solve_limit(mesh, field, d, data, lumped).energy.total));
  }
  EXPECT_LT(gaps[1], gaps[0]);
  EXPECT_LT(gaps[2], gaps[1]);
}
