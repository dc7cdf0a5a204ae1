#pragma once

#include <span>
#include <vector>

namespace insulation {

struct ProxResult {
  std::vector<double> v;
  /// offset + sum_j w_j |v_j| at the minimizer
  double s = 0.0;
};

/// argmin_v 0.5 |v - z|^2 + (alpha / 2) (offset + sum_j w_j |v_j|)^2, for w > 0,
/// alpha >= 0, offset >= 0. Exact: v_j = soft(z_j, alpha s w_j), with s located among
/// the sorted breakpoints |z_j| / (alpha w_j).
ProxResult prox_sq_l1(std::span<const double> z, std::span<const double> w, double alpha, double offset = 0.0);

}  // namespace insulation
