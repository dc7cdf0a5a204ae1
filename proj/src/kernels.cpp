#include "insulation/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "insulation/error.hpp"
#include "insulation/mesh.hpp"

namespace insulation {

int SparseMatrix::find(int r, int c) const {
  const auto begin = cols.begin() + row_ptr[static_cast<std::size_t>(r)];
  const auto end = cols.begin() + row_ptr[static_cast<std::size_t>(r) + 1];
  const auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c) return -1;
  return static_cast<int>(it - cols.begin());
}

double SparseMatrix::at(int r, int c) const {
  const int pos = find(r, c);
  return pos < 0 ? 0.0 : values[static_cast<std::size_t>(pos)];
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(rows), 0.0);
  for (int r = 0; r < rows; ++r) d[static_cast<std::size_t>(r)] = at(r, r);
  return d;
}

std::vector<double> SparseMatrix::row_sums() const {
  std::vector<double> s(static_cast<std::size_t>(rows), 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int k = row_ptr[static_cast<std::size_t>(r)]; k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
      s[static_cast<std::size_t>(r)] += values[static_cast<std::size_t>(k)];
    }
  }
  return s;
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
  return diagonal_matrix(ones);
}

SparseMatrix SparseMatrix::diagonal_matrix(std::span<const double> diag) {
  SparseMatrix m;
  m.rows = static_cast<int>(diag.size());
  m.row_ptr.resize(diag.size() + 1);
  for (std::size_t i = 0; i <= diag.size(); ++i) m.row_ptr[i] = static_cast<int>(i);
  m.cols.resize(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.cols[i] = static_cast<int>(i);
  m.values.assign(diag.begin(), diag.end());
  return m;
}

SparseMatrix SparseMatrix::plus(const SparseMatrix& other, double scale) const {
  if (other.rows != rows) throw Error(ErrorKind::MeshMismatch, "matrix size mismatch");
  SparseMatrix out;
  out.rows = rows;
  out.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
  for (int r = 0; r < rows; ++r) {
    int i = row_ptr[static_cast<std::size_t>(r)];
    const int ie = row_ptr[static_cast<std::size_t>(r) + 1];
    int j = other.row_ptr[static_cast<std::size_t>(r)];
    const int je = other.row_ptr[static_cast<std::size_t>(r) + 1];
    while (i < ie || j < je) {
      const int ci = i < ie ? cols[static_cast<std::size_t>(i)] : rows;
      const int cj = j < je ? other.cols[static_cast<std::size_t>(j)] : rows;
      if (ci == cj) {
        out.cols.push_back(ci);
        out.values.push_back(values[static_cast<std::size_t>(i++)] + scale * other.values[static_cast<std::size_t>(j++)]);
      } else if (ci < cj) {
        out.cols.push_back(ci);
        out.values.push_back(values[static_cast<std::size_t>(i++)]);
      } else {
        out.cols.push_back(cj);
        out.values.push_back(scale * other.values[static_cast<std::size_t>(j++)]);
      }
    }
    out.row_ptr[static_cast<std::size_t>(r) + 1] = static_cast<int>(out.cols.size());
  }
  return out;
}

double SparseMatrix::max_asymmetry() const {
  double worst = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int k = row_ptr[static_cast<std::size_t>(r)]; k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
      const int c = cols[static_cast<std::size_t>(k)];
      worst = std::max(worst, std::abs(values[static_cast<std::size_t>(k)] - at(c, r)));
    }
  }
  return worst;
}

namespace kernels {

namespace {
constexpr std::size_t kDotBlock = 2048;
}

Incidence node_incidence(const TriMesh& mesh) {
  Incidence inc;
  const auto n = static_cast<std::size_t>(mesh.node_count());
  inc.offsets.assign(n + 1, 0);
  for (const auto& t : mesh.triangles) {
    for (int v : t) ++inc.offsets[static_cast<std::size_t>(v) + 1];
  }
  for (std::size_t i = 0; i < n; ++i) inc.offsets[i + 1] += inc.offsets[i];
  inc.triangles.resize(static_cast<std::size_t>(inc.offsets[n]));
  std::vector<int> fill(inc.offsets.begin(), inc.offsets.end() - 1);
  for (int ti = 0; ti < mesh.triangle_count(); ++ti) {
    for (int v : mesh.triangles[static_cast<std::size_t>(ti)]) {
      inc.triangles[static_cast<std::size_t>(fill[static_cast<std::size_t>(v)]++)] = ti;
    }
  }
  return inc;
}

SparseMatrix p1_pattern(const TriMesh& mesh) {
  const Incidence inc = node_incidence(mesh);
  SparseMatrix m;
  m.rows = mesh.node_count();
  m.row_ptr.assign(static_cast<std::size_t>(m.rows) + 1, 0);
  std::vector<int> row;
  for (int r = 0; r < m.rows; ++r) {
    row.clear();
    for (int k = inc.offsets[static_cast<std::size_t>(r)]; k < inc.offsets[static_cast<std::size_t>(r) + 1]; ++k) {
      const auto& t = mesh.triangles[static_cast<std::size_t>(inc.triangles[static_cast<std::size_t>(k)])];
      row.insert(row.end(), t.begin(), t.end());
    }
    row.push_back(r);
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    m.cols.insert(m.cols.end(), row.begin(), row.end());
    m.row_ptr[static_cast<std::size_t>(r) + 1] = static_cast<int>(m.cols.size());
  }
  m.values.assign(m.cols.size(), 0.0);
  return m;
}

void assemble(SparseMatrix& matrix, const TriMesh& mesh, const Incidence& incidence, const ElementKernel& kernel) {
  std::fill(matrix.values.begin(), matrix.values.end(), 0.0);
  const int rows = matrix.rows;
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    ElementMatrix ke;
    for (int k = incidence.offsets[static_cast<std::size_t>(r)]; k < incidence.offsets[static_cast<std::size_t>(r) + 1]; ++k) {
      const int ti = incidence.triangles[static_cast<std::size_t>(k)];
      const auto& t = mesh.triangles[static_cast<std::size_t>(ti)];
      const int lr = t[0] == r ? 0 : (t[1] == r ? 1 : 2);
      kernel(ti, ke);
      for (int lc = 0; lc < 3; ++lc) {
        const int pos = matrix.find(r, t[static_cast<std::size_t>(lc)]);
        matrix.values[static_cast<std::size_t>(pos)] += ke[static_cast<std::size_t>(lr)][static_cast<std::size_t>(lc)];
      }
    }
  }
}

void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  const int rows = a.rows;
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int k = a.row_ptr[static_cast<std::size_t>(r)]; k < a.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
      s += a.values[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(a.cols[static_cast<std::size_t>(k)])];
    }
    y[static_cast<std::size_t>(r)] = s;
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const std::size_t blocks = (n + kDotBlock - 1) / kDotBlock;
  if (blocks <= 1) return serial::dot(x, y);
  std::vector<double> partial(blocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kDotBlock;
    const std::size_t hi = std::min(n, lo + kDotBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += alpha * x[static_cast<std::size_t>(i)];
}

void configure_threads_from_env() {
  if (const char* env = std::getenv("INSULATION_NUM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
}

namespace serial {

void assemble(SparseMatrix& matrix, const TriMesh& mesh, const ElementKernel& kernel) {
  std::fill(matrix.values.begin(), matrix.values.end(), 0.0);
  ElementMatrix ke;
  for (int ti = 0; ti < mesh.triangle_count(); ++ti) {
    const auto& t = mesh.triangles[static_cast<std::size_t>(ti)];
    kernel(ti, ke);
    for (int lr = 0; lr < 3; ++lr) {
      for (int lc = 0; lc < 3; ++lc) {
        const int pos = matrix.find(t[static_cast<std::size_t>(lr)], t[static_cast<std::size_t>(lc)]);
        matrix.values[static_cast<std::size_t>(pos)] += ke[static_cast<std::size_t>(lr)][static_cast<std::size_t>(lc)];
      }
    }
  }
}

void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  for (int r = 0; r < a.rows; ++r) {
    double s = 0.0;
    for (int k = a.row_ptr[static_cast<std::size_t>(r)]; k < a.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
      s += a.values[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(a.cols[static_cast<std::size_t>(k)])];
    }
    y[static_cast<std::size_t>(r)] = s;
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

}  // namespace serial
}  // namespace kernels
}  // namespace insulation
