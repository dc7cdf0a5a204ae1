#include "insulation/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "insulation/error.hpp"

namespace insulation {

ProxResult prox_sq_l1(std::span<const double> z, std::span<const double> w, double alpha, double offset) {
  const std::size_t n = z.size();
  if (w.size() != n) throw Error(ErrorKind::MeshMismatch, "prox: weight count");
  for (double wj : w) {
    if (!(wj > 0.0)) throw Error(ErrorKind::NonpositiveWeight, "prox: weights must be positive");
  }
  ProxResult out;
  out.v.assign(z.begin(), z.end());
  if (!(alpha > 0.0)) {
    double s = offset;
    for (std::size_t j = 0; j < n; ++j) s += w[j] * std::abs(z[j]);
    out.s = s;
    return out;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto breakpoint = [&](std::size_t j) { return std::abs(z[j]) / (alpha * w[j]); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ba = breakpoint(a);
    const double bb = breakpoint(b);
    return ba != bb ? ba > bb : a < b;
  });

  double num = offset;
  double den = 1.0;
  double s = offset;
  for (std::size_t k = 0; k <= n; ++k) {
    s = num / den;
    if (k == n || s >= breakpoint(order[k])) break;
    const std::size_t j = order[k];
    num += w[j] * std::abs(z[j]);
    den += alpha * w[j] * w[j];
  }
  out.s = s;
  for (std::size_t j = 0; j < n; ++j) {
    const double mag = std::abs(z[j]) - alpha * s * w[j];
    out.v[j] = mag > 0.0 ? std::copysign(mag, z[j]) : 0.0;
  }
  return out;
}

}  // namespace insulation
