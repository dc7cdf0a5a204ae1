#pragma once

#include <span>
#include <vector>

namespace insulation {

/// Square matrix in compressed-row form with sorted column indices per row.
struct SparseMatrix {
  int rows = 0;
  std::vector<int> row_ptr{0};
  std::vector<int> cols;
  std::vector<double> values;

  int nonzeros() const { return static_cast<int>(cols.size()); }
  /// Position of (r, c) in `values`, or -1 when outside the pattern.
  int find(int r, int c) const;
  double at(int r, int c) const;
  std::vector<double> diagonal() const;
  std::vector<double> row_sums() const;

  static SparseMatrix identity(int n);
  static SparseMatrix diagonal_matrix(std::span<const double> diag);
  /// Assumes both operands share this matrix's pattern shape; adds entrywise on the union.
  SparseMatrix plus(const SparseMatrix& other, double scale = 1.0) const;
  double max_asymmetry() const;
};

}  // namespace insulation
