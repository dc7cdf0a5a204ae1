#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "insulation/sparse.hpp"

namespace insulation {

struct TriMesh;

/// Data-parallel inner loops. The OpenMP versions are deterministic: every output entry
/// is accumulated in a fixed order that does not depend on the thread count, so results
/// are bit-identical across schedules. `serial::` holds the plain reference loops kept
/// for tests and benchmarks.
namespace kernels {

using ElementMatrix = std::array<std::array<double, 3>, 3>;
/// Fills the element matrix of triangle `t`.
using ElementKernel = std::function<void(int t, ElementMatrix& out)>;

/// Node-to-triangle incidence in ascending triangle order.
struct Incidence {
  std::vector<int> offsets;
  std::vector<int> triangles;
};
Incidence node_incidence(const TriMesh& mesh);

/// P1 sparsity pattern (node adjacency including the diagonal), zero values.
SparseMatrix p1_pattern(const TriMesh& mesh);

/// Row-parallel gather assembly into a matrix carrying `p1_pattern(mesh)`.
void assemble(SparseMatrix& matrix, const TriMesh& mesh, const Incidence& incidence, const ElementKernel& kernel);

void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
/// Blocked dot product; partial sums per fixed-size block, reduced sequentially.
double dot(std::span<const double> x, std::span<const double> y);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// Sets the OpenMP thread count from INSULATION_NUM_THREADS when present.
void configure_threads_from_env();

namespace serial {
void assemble(SparseMatrix& matrix, const TriMesh& mesh, const ElementKernel& kernel);
void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
}  // namespace serial

}  // namespace kernels
}  // namespace insulation
