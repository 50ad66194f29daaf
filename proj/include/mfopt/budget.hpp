#pragma once

#include <cstdint>
#include <vector>

#include "mfopt/errors.hpp"

namespace mfopt {

/// Fidelity level index: 0 is the highest (most expensive) fidelity, q the
/// lowest.
using FidelityLevel = int;

/// Per-level query cost in 0-fidelity-equivalent budget units. Convention:
/// w[0] == 1 and the entries are strictly decreasing.
struct CostVector {
  std::vector<double> w;

  CostVector() = default;
  explicit CostVector(std::vector<double> weights) : w(std::move(weights)) { validate(); }

  int num_levels() const { return static_cast<int>(w.size()); }
  int q() const { return num_levels() - 1; }
  double at(int level) const { return w.at(static_cast<std::size_t>(level)); }

  void validate() const {
    if (w.empty()) throw ConfigError("cost vector must have at least one level");
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] <= 0.0) throw ConfigError("cost vector entries must be positive");
      if (i > 0 && w[i] >= w[i - 1])
        throw ConfigError("cost vector entries must be strictly decreasing");
    }
  }
};

/// Fractional-cost budget accounting for one solver run. Charges are recorded
/// at query time; the spent amount never decreases and always equals the
/// cost-weighted per-level query counts. Callers check exhausted() before
/// starting a batch, so a completed in-flight batch may overshoot the limit
/// by at most one batch's cost.
class BudgetLedger {
 public:
  BudgetLedger(double limit, CostVector costs)
      : limit_(limit), costs_(std::move(costs)),
        queries_(static_cast<std::size_t>(costs_.num_levels()), 0) {}

  void charge(FidelityLevel level, std::int64_t count) {
    if (level < 0 || level >= costs_.num_levels()) throw InvalidLevel("charge: bad level");
    if (count < 0) throw ConfigError("charge: negative count");
    const double cost = costs_.at(level) * static_cast<double>(count);
    if (cost > max_single_charge_) max_single_charge_ = cost;
    queries_[static_cast<std::size_t>(level)] += count;
  }

  bool exhausted() const { return spent() >= limit_; }

  double limit() const { return limit_; }
  double remaining() const { return limit_ - spent(); }
  double overshoot() const { return spent() > limit_ ? spent() - limit_ : 0.0; }
  /// Largest single batch charge seen; bounds the possible overshoot.
  double max_single_charge() const { return max_single_charge_; }

  /// Always derived from the query counters, so it equals the cost-weighted
  /// counts exactly and is nondecreasing.
  double spent() const {
    double s = 0.0;
    for (int i = 0; i < costs_.num_levels(); ++i)
      s += costs_.at(i) * static_cast<double>(queries_[static_cast<std::size_t>(i)]);
    return s;
  }

  const CostVector& costs() const { return costs_; }
  std::int64_t queries(FidelityLevel level) const {
    return queries_.at(static_cast<std::size_t>(level));
  }
  const std::vector<std::int64_t>& per_level_queries() const { return queries_; }

 private:
  double limit_ = 0.0;
  double max_single_charge_ = 0.0;
  CostVector costs_;
  std::vector<std::int64_t> queries_;
};

}  // namespace mfopt
