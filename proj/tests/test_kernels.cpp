#include <gtest/gtest.h>
#include <omp.h>

#include <cstring>
#include <random>

#include "insulation/fem.hpp"
#include "insulation/kernels.hpp"
#include "insulation/solver_eps.hpp"
#include "support.hpp"

using namespace insulation;

namespace {

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

class ThreadCount : public ::testing::Test {
 protected:
  void SetUp() override { saved_ = omp_get_max_threads(); }
  void TearDown() override { omp_set_num_threads(saved_); }
  int saved_ = 1;
};

}  // namespace

TEST_F(ThreadCount, AssemblyIndependentOfThreads) {
  const TriMesh mesh = triangulate_bulk(testing_support::l_shape(), 1.0 / 32);
  omp_set_num_threads(1);
  const SparseMatrix one = assemble_stiffness(mesh, {});
  for (int threads : {2, 3, 8}) {
    omp_set_num_threads(threads);
    EXPECT_TRUE(bit_equal(one.values, assemble_stiffness(mesh, {}).values)) << threads << " threads";
  }
}

TEST_F(ThreadCount, ParallelSpmvAndDotMatchSerialBitwise) {
  const TriMesh mesh = triangulate_bulk(testing_support::l_shape(), 1.0 / 64);
  const SparseMatrix a = assemble_stiffness(mesh, {});
  const auto x = random_vector(static_cast<std::size_t>(a.rows), 7);
  std::vector<double> ys(x.size());
  kernels::serial::spmv(a, x, ys);
  omp_set_num_threads(1);
  const double d1 = kernels::dot(x, ys);
  for (int threads : {2, 5}) {
    omp_set_num_threads(threads);
    std::vector<double> yp(x.size());
    kernels::spmv(a, x, yp);
    EXPECT_TRUE(bit_equal(ys, yp));
    EXPECT_EQ(kernels::dot(x, ys), d1);
  }
}

TEST_F(ThreadCount, SerialAssemblyAgreesWithGather) {
  const TriMesh mesh = triangulate_bulk(testing_support::insulated_square(), 1.0 / 16);
  const SparseMatrix gathered = assemble_stiffness(mesh, {});
  SparseMatrix scattered = kernels::p1_pattern(mesh);
  const auto& nodes = mesh.nodes;
  kernels::serial::assemble(scattered, mesh, [&](int t, kernels::ElementMatrix& ke) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    Vec2 g[3];
    const Vec2& a = nodes[static_cast<std::size_t>(tri[0])];
    const Vec2& b = nodes[static_cast<std::size_t>(tri[1])];
    const Vec2& c = nodes[static_cast<std::size_t>(tri[2])];
    const double twice = cross(b - a, c - a);
    g[0] = Vec2{b.y - c.y, c.x - b.x} * (1.0 / twice);
    g[1] = Vec2{c.y - a.y, a.x - c.x} * (1.0 / twice);
    g[2] = Vec2{a.y - b.y, b.x - a.x} * (1.0 / twice);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) ke[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 0.5 * twice * dot(g[i], g[j]);
    }
  });
  ASSERT_EQ(gathered.cols, scattered.cols);
  for (std::size_t k = 0; k < gathered.values.size(); ++k) EXPECT_NEAR(gathered.values[k], scattered.values[k], 1e-13);
}

TEST_F(ThreadCount, ThinLayerSolveIsReproducible) {
  const TransversalField field = TransversalField::build(testing_support::l_shape(), FieldMode::Bisector);
  const auto d = InsulationDistribution::constant(field, 1.0);
  const TriMesh glued = extrude_layer(triangulate_bulk(field.domain(), 1.0 / 32), field, d, 0.05, 4);
  const auto data = ProblemData::from_domain(field.domain(), 1.0);
  omp_set_num_threads(1);
  const EpsSolution a = solve_eps(glued, 0.05, data);
  omp_set_num_threads(4);
  const EpsSolution b = solve_eps(glued, 0.05, data);
  EXPECT_TRUE(bit_equal(a.u.values, b.u.values));
  EXPECT_EQ(a.energy.total, b.energy.total);
}
