#pragma once

#include <optional>
#include <string>
#include <utility>

#include "mfopt/problem.hpp"

namespace mfopt {

/// Stochastic multi-fidelity Rosenbrock family (q = 2) on the box [-2,2]^d.
///
/// Deterministic parts:
///   f0 = sum_{i<d} 10 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2
///   f1 = sum_{i<d} [5 (x_{i+1} - x_i^2)^2 + (-2 - x_i)^2] - 0.5 sum_i x_i
///   f2 = (f0 - 4 - 0.5 sum_i x_i) / (10 + 0.25 d x_1)
/// With f2_sum_all_coords the divisor becomes 10 + 0.25 sum_i x_i instead.
///
/// Noise: i.i.d. E_i^t ~ N(0, noise_scale^2 / d). Level 0 adds sum E_i^0;
/// level t in {1,2} adds sum (E_i^0 + E_i^t)/2, with the E^0 draws taken from
/// the shared CRN substream so levels are positively correlated.
class RosenbrockMF : public MultiFidelityProblem {
 public:
  struct Params {
    int d = 2;
    double noise_scale = 1.0;
    bool f2_sum_all_coords = false;
  };

  explicit RosenbrockMF(Params p) : p_(p), costs_({1.0, 0.3, 0.1}) {
    if (p_.d < 2) throw ConfigError("rosenbrock_mf: dimension must be at least 2");
    if (p_.noise_scale < 0.0) throw ConfigError("rosenbrock_mf: noise_scale must be nonnegative");
  }

  std::string name() const override { return "rosenbrock_mf"; }
  int dimension() const override { return p_.d; }
  int num_levels() const override { return 3; }
  const CostVector& costs() const override { return costs_; }

  std::optional<Box> bounds() const override {
    return Box{Point(static_cast<std::size_t>(p_.d), -2.0),
               Point(static_cast<std::size_t>(p_.d), 2.0)};
  }

  std::optional<std::pair<Point, double>> reference_optimum() const override {
    return std::make_pair(Point(static_cast<std::size_t>(p_.d), 1.0), 0.0);
  }

  double deterministic_value(const Point& x, FidelityLevel level) const;

  /// Evaluates the formula at x as given; keeping iterates inside the box is
  /// the caller's projection policy.
  double evaluate(const Point& x, FidelityLevel level, const Replication& rep) const override {
    check_level(level);
    return deterministic_value(x, level) + noise(rep, level);
  }

  /// Noise term for one replication at the given level; zero when
  /// noise_scale is zero.
  double noise(const Replication& rep, FidelityLevel level) const;

  const Params& params() const { return p_; }

 private:
  Params p_;
  CostVector costs_;
};

}  // namespace mfopt
