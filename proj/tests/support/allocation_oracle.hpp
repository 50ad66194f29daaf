#pragma once

// Test-only brute-force reference for the two-level sample-allocation
// problem: exact optimum over the integer grid n in [n_min, n_max]^2 with
// n0 <= n1, and c on a uniform grid over [-3, 3]. For fixed c the variance
// var0/n0 + (1/n0 - 1/n1) g(c) is monotone in n1 when g < 0, so the minimal
// feasible n1 per (c, n0) comes from bisection over the same integer grid;
// the result is identical to exhaustive enumeration.

#include <cmath>
#include <cstdint>
#include <limits>

namespace mfopt::testing {

struct GridOptimum {
  bool feasible = false;
  double cost = std::numeric_limits<double>::infinity();
  std::int64_t n0 = 0;
  std::int64_t n1 = 0;
  double c = 0.0;
};

inline GridOptimum brute_force_allocation(double var0, double var1, double cov, double w0,
                                          double w1, double target_variance,
                                          std::int64_t n_min = 2, std::int64_t n_max = 2000,
                                          int c_points = 300) {
  GridOptimum best;
  for (int ic = 0; ic < c_points; ++ic) {
    const double c = -3.0 + 6.0 * ic / (c_points - 1);
    const double g = c * c * var1 - 2.0 * c * cov;
    for (std::int64_t n0 = n_min; n0 <= n_max; ++n0) {
      if (w0 * static_cast<double>(n0) >= best.cost) break;  // cost only grows with n0
      const double lead = var0 / static_cast<double>(n0);
      auto variance_at = [&](std::int64_t n1) {
        return lead + (1.0 / static_cast<double>(n0) - 1.0 / static_cast<double>(n1)) * g;
      };
      std::int64_t n1;
      if (g >= 0.0) {
        n1 = n0;  // any n1 > n0 only adds variance and cost
        if (variance_at(n1) > target_variance) continue;
      } else {
        if (variance_at(n_max) > target_variance) continue;
        std::int64_t lo = n0, hi = n_max;  // variance decreasing in n1
        if (variance_at(lo) <= target_variance) {
          hi = lo;
        } else {
          while (hi - lo > 1) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            if (variance_at(mid) <= target_variance)
              hi = mid;
            else
              lo = mid;
          }
        }
        n1 = hi;
      }
      const double cost = w0 * static_cast<double>(n0) + w1 * static_cast<double>(n1);
      if (cost < best.cost) {
        best = GridOptimum{true, cost, n0, n1, c};
      }
    }
  }
  return best;
}

}  // namespace mfopt::testing
