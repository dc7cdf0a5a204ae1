#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "insulation/error.hpp"
#include "insulation/fem.hpp"
#include "insulation/kernels.hpp"
#include "support.hpp"

using namespace insulation;

namespace {

TriMesh right_triangle(double scale = 1.0) {
  TriMesh mesh;
  mesh.id = next_mesh_id();
  mesh.nodes = {{0, 0}, {scale, 0}, {0, scale}};
  mesh.triangles = {{0, 1, 2}};
  mesh.regions = {Region::Bulk};
  mesh.bulk_node_count = 3;
  mesh.bulk_triangle_count = 1;
  return mesh;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST(Stiffness, ReferenceElement) {
  const TriMesh mesh = right_triangle();
  const SparseMatrix a = assemble_stiffness(mesh, {});
  const double expected[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(a.at(i, j), expected[i][j], 1e-15);
  }
  const SparseMatrix a2 = assemble_stiffness(mesh, {2.0, 1.0});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(a2.at(i, j), 2.0 * expected[i][j], 1e-15);
  }
  EXPECT_THROW(assemble_stiffness(mesh, {-1.0, 1.0}), Error);
}

TEST(Stiffness, ConstantsInKernelAndSymmetric) {
  const TriMesh mesh = triangulate_bulk(testing_support::l_shape(), 0.1);
  const SparseMatrix a = assemble_stiffness(mesh, {});
  const std::vector<double> ones(static_cast<std::size_t>(mesh.node_count()), 3.0);
  std::vector<double> y(ones.size());
  kernels::serial::spmv(a, ones, y);
  for (double v : y) EXPECT_NEAR(v, 0.0, 1e-12);
  EXPECT_EQ(a.max_asymmetry(), 0.0);
}

TEST(Mass, ConsistentIntegratesArea) {
  const TriMesh mesh = triangulate_bulk(testing_support::l_shape(), 0.1);
  const SparseMatrix m = assemble_mass(mesh, {});
  const std::vector<double> ones(static_cast<std::size_t>(mesh.node_count()), 1.0);
  EXPECT_NEAR(2.0 * quadratic_form(m, ones), 0.75, 1e-13);
}

TEST(BoundaryMass, SingleEdge) {
  const TriMesh mesh = right_triangle(2.0);
  const std::vector<BoundaryEdge> edges{{0, 1, EdgeTag::Insulated, 0, 0.0, 1.0}};
  const auto one = [](const BoundaryEdge&, double) { return 1.0; };
  const SparseMatrix m = assemble_boundary_mass(mesh, edges, one);
  const double l = 2.0;
  EXPECT_NEAR(m.at(0, 0), l / 3, 1e-15);
  EXPECT_NEAR(m.at(0, 1), l / 6, 1e-15);
  EXPECT_NEAR(m.at(1, 1), l / 3, 1e-15);
  EXPECT_EQ(m.at(2, 2), 0.0);
  const auto lumped = assemble_boundary_mass_lumped(mesh, edges, one);
  EXPECT_NEAR(lumped[0], l / 2, 1e-15);
  EXPECT_NEAR(lumped[1], l / 2, 1e-15);
  EXPECT_EQ(lumped[2], 0.0);
  const auto zero = [](const BoundaryEdge&, double) { return 0.0; };
  try {
    assemble_boundary_mass(mesh, edges, zero);
    FAIL() << "zero weight accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonpositiveWeight);
  }
}

TEST(BoundaryMass, QuadraticWeightIntegratedExactly) {
  const TriMesh mesh = right_triangle(2.0);
  const std::vector<BoundaryEdge> edges{{0, 1, EdgeTag::Insulated, 0, 0.0, 1.0}};
  const SparseMatrix m = assemble_boundary_mass(mesh, edges, [](const BoundaryEdge&, double xi) { return 4 * xi * xi; });
  // weight x^2 along [0, 2], phi_1 = x/2: integral of x^4/4 is 8/5
  EXPECT_NEAR(m.at(1, 1), 8.0 / 5.0, 1e-14);
}

TEST(Load, PartitionOfUnity) {
  const auto domain = testing_support::insulated_square();
  const TriMesh mesh = triangulate_bulk(domain, 0.1);
  EXPECT_NEAR(sum(assemble_load(mesh, ProblemData::from_domain(domain, 1.0))), 1.0, 1e-14);
  ProblemData bad;
  bad.f_per_triangle = {1.0, 2.0};
  EXPECT_THROW(assemble_load(mesh, bad), Error);
}

TEST(Neumann, UnitFluxOnUnitFacet) {
  const auto domain = testing_support::unit_square(FacetLabel::Neumann, FacetLabel::Insulated, FacetLabel::Insulated,
                                                   FacetLabel::Insulated);
  const TriMesh mesh = triangulate_bulk(domain, 0.1);
  ProblemData data;
  data.g[0] = 1.0;
  EXPECT_NEAR(sum(assemble_neumann(mesh, data)), 1.0, 1e-14);
}

TEST(ProblemData, LabelsAreChecked) {
  const auto domain = testing_support::pseudo_1d();
  ProblemData data = ProblemData::from_domain(domain);
  EXPECT_EQ(data.u_D.at(3), 1.0);
  data.validate(domain);
  data.g[1] = 1.0;  // facet 1 is insulated
  try {
    data.validate(domain);
    FAIL() << "expected UnknownLabel";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownLabel);
  }
}

TEST(Dirichlet, ZeroDataLeavesRhsAndRemovesRows) {
  LinearSystem sys;
  sys.matrix = SparseMatrix::identity(3).plus(SparseMatrix::identity(3));
  sys.rhs = {1.0, 2.0, 3.0};
  sys.constraints = {{1, 0.0}};
  const ReducedSystem red = apply_dirichlet(sys);
  EXPECT_EQ(red.matrix.rows, 2);
  EXPECT_EQ(red.rhs, (std::vector<double>{1.0, 3.0}));
  EXPECT_EQ(red.free_index[1], -1);
  EXPECT_EQ(red.expand(std::vector<double>{5.0, 6.0}), (std::vector<double>{5.0, 0.0, 6.0}));
}

TEST(Dirichlet, ValuesMoveToRhs) {
  // chain 0 - 1 - 2 with unit springs, u_0 = 1, u_2 = 0
  LinearSystem sys;
  const std::vector<double> diag{1.0, 2.0, 1.0};
  SparseMatrix a = SparseMatrix::diagonal_matrix(diag);
  a = a.plus(SparseMatrix{3, {0, 1, 3, 4}, {1, 0, 2, 1}, {-1.0, -1.0, -1.0, -1.0}});
  sys.matrix = a;
  sys.rhs = {0.0, 0.0, 0.0};
  sys.constraints = {{0, 1.0}, {2, 0.0}};
  const ReducedSystem red = apply_dirichlet(sys);
  ASSERT_EQ(red.rhs.size(), 1u);
  EXPECT_DOUBLE_EQ(red.rhs[0], 1.0);
}

TEST(ConjugateGradient, IdentityReturnsRhs) {
  const SparseMatrix id = SparseMatrix::identity(5);
  const std::vector<double> b{1.0, -2.0, 3.5, 0.0, 7.0};
  const CgResult r = conjugate_gradient(id, b, {});
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(r.x[i], b[i], 1e-14);
}

TEST(ConjugateGradient, ThreeNodeChain) {
  // ends fixed at zero, unit load at the middle: 2 u = 1
  LinearSystem sys;
  SparseMatrix a = SparseMatrix::diagonal_matrix(std::vector<double>{1.0, 2.0, 1.0});
  a = a.plus(SparseMatrix{3, {0, 1, 3, 4}, {1, 0, 2, 1}, {-1.0, -1.0, -1.0, -1.0}});
  sys.matrix = a;
  sys.rhs = {0.0, 1.0, 0.0};
  sys.constraints = {{0, 0.0}, {2, 0.0}};
  TriMesh dummy;
  dummy.id = next_mesh_id();
  dummy.nodes.resize(3);
  const ScalarField u = solve_spd(sys, {}, dummy);
  EXPECT_NEAR(u[1], 0.5, 1e-14);
  EXPECT_EQ(u[0], 0.0);
}

TEST(ConjugateGradient, IndefiniteMatrixFails) {
  const SparseMatrix a = SparseMatrix::diagonal_matrix(std::vector<double>{1.0, -1.0});
  try {
    conjugate_gradient(a, std::vector<double>{1.0, 1.0}, {});
    FAIL() << "expected NoConvergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoConvergence);
  }
}

TEST(ConjugateGradient, IterationCapFails) {
  const TriMesh mesh = triangulate_bulk(testing_support::insulated_square(), 0.05);
  const SparseMatrix a = assemble_stiffness(mesh, {}).plus(assemble_mass(mesh, {}));
  const std::vector<double> b(static_cast<std::size_t>(mesh.node_count()), 1.0);
  CgOptions opt;
  opt.max_iter = 2;
  EXPECT_THROW(conjugate_gradient(a, b, opt), Error);
}

TEST(BoundaryL1, ConstantAndHomogeneous) {
  const TransversalField field = TransversalField::build(testing_support::l_shape(), FieldMode::Bisector);
  const TriMesh mesh = triangulate_bulk(field.domain(), 0.1);
  const InsulatedTrace trace = insulated_trace(mesh, field);
  ScalarField v = ScalarField::zeros(mesh);
  std::fill(v.values.begin(), v.values.end(), 1.0);
  EXPECT_NEAR(boundary_l1(v, mesh, trace), 4.0, 1e-13);
  for (std::size_t i = 0; i < v.values.size(); ++i) v.values[i] = std::sin(3.0 * static_cast<double>(i));
  const double base = boundary_l1(v, mesh, trace);
  for (double alpha : {-2.5, 0.0, 1e-3, 7.0}) {
    ScalarField w = v;
    for (double& x : w.values) x *= alpha;
    EXPECT_NEAR(boundary_l1(w, mesh, trace), std::abs(alpha) * base, 1e-12 * (1 + base));
  }
}

TEST(ScalarField, MeshMismatch) {
  const TriMesh a = triangulate_bulk(testing_support::insulated_square(), 0.5);
  const TriMesh b = triangulate_bulk(testing_support::insulated_square(), 0.5);
  try {
    require_same_mesh(ScalarField::zeros(a), b);
    FAIL() << "expected MeshMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MeshMismatch);
  }
}
