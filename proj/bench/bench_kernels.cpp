#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "insulation/fem.hpp"
#include "insulation/kernels.hpp"

using namespace insulation;

namespace {

const TriMesh& square_mesh(int level) {
  static std::map<int, TriMesh> cache;
  auto it = cache.find(level);
  if (it == cache.end()) {
    const PolygonalDomain domain({{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                                 {{{0, 1}, FacetLabel::Insulated, 0.0},
                                  {{1, 2}, FacetLabel::Insulated, 0.0},
                                  {{2, 3}, FacetLabel::Insulated, 0.0},
                                  {{3, 0}, FacetLabel::Dirichlet, 0.0}});
    it = cache.emplace(level, triangulate_bulk(domain, 1.0 / (1 << level))).first;
  }
  return it->second;
}

std::vector<double> random_vector(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = uni(rng);
  return v;
}

void p1_kernel(const TriMesh& mesh, int ti, kernels::ElementMatrix& ke) {
  const double area = mesh.signed_area(ti) / 12.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) ke[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = (i == j ? 2.0 : 1.0) * area;
  }
}

void BM_SpmvSerial(benchmark::State& state) {
  const TriMesh& mesh = square_mesh(static_cast<int>(state.range(0)));
  const SparseMatrix a = assemble_stiffness(mesh, {});
  const auto x = random_vector(static_cast<std::size_t>(a.rows));
  std::vector<double> y(x.size());
  for (auto _ : state) {
    kernels::serial::spmv(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * a.nonzeros());
}

void BM_SpmvParallel(benchmark::State& state) {
  const TriMesh& mesh = square_mesh(static_cast<int>(state.range(0)));
  const SparseMatrix a = assemble_stiffness(mesh, {});
  const auto x = random_vector(static_cast<std::size_t>(a.rows));
  std::vector<double> y(x.size());
  for (auto _ : state) {
    kernels::spmv(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * a.nonzeros());
}

void BM_DotSerial(benchmark::State& state) {
  const auto x = random_vector(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::dot(x, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DotParallel(benchmark::State& state) {
  const auto x = random_vector(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dot(x, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_AssembleSerial(benchmark::State& state) {
  const TriMesh& mesh = square_mesh(static_cast<int>(state.range(0)));
  SparseMatrix m = kernels::p1_pattern(mesh);
  for (auto _ : state) {
    kernels::serial::assemble(m, mesh, [&](int t, kernels::ElementMatrix& ke) { p1_kernel(mesh, t, ke); });
    benchmark::DoNotOptimize(m.values.data());
  }
  state.SetItemsProcessed(state.iterations() * mesh.triangle_count());
}

void BM_AssembleParallel(benchmark::State& state) {
  const TriMesh& mesh = square_mesh(static_cast<int>(state.range(0)));
  SparseMatrix m = kernels::p1_pattern(mesh);
  const auto inc = kernels::node_incidence(mesh);
  for (auto _ : state) {
    kernels::assemble(m, mesh, inc, [&](int t, kernels::ElementMatrix& ke) { p1_kernel(mesh, t, ke); });
    benchmark::DoNotOptimize(m.values.data());
  }
  state.SetItemsProcessed(state.iterations() * mesh.triangle_count());
}

}  // namespace

BENCHMARK(BM_SpmvSerial)->DenseRange(5, 8);
BENCHMARK(BM_SpmvParallel)->DenseRange(5, 8);
BENCHMARK(BM_DotSerial)->RangeMultiplier(8)->Range(1 << 10, 1 << 22);
BENCHMARK(BM_DotParallel)->RangeMultiplier(8)->Range(1 << 10, 1 << 22);
BENCHMARK(BM_AssembleSerial)->DenseRange(5, 8);
BENCHMARK(BM_AssembleParallel)->DenseRange(5, 8);

BENCHMARK_MAIN();
