#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfopt/problem.hpp"

namespace mfopt {

/// Continuous (s,S) periodic-review inventory simulation (q = 2). The
/// decision is (s, S): when the inventory position falls below s, order up to
/// S. Demand per period is Exponential(theta); order lead times are
/// Poisson(lead_mean) periods. Fidelity is the run length: level 0 simulates
/// horizon_days[0] periods, lower levels a prefix-shared shorter horizon, all
/// driven by the same CRN stream. Reported value is average cost per period
/// (holding + backorder + ordering).
class InventorySS : public MultiFidelityProblem {
 public:
  struct Params {
    double theta = 100.0;       // mean demand per period
    double lead_mean = 3.0;     // mean lead time in periods
    double holding_cost = 1.0;  // per unit on hand per period
    double backorder_cost = 4.0;
    double order_fixed_cost = 36.0;
    double order_unit_cost = 2.0;
    std::vector<int> horizon_days = {100, 50, 30};
  };

  struct PeriodRecord {
    double demand = 0.0;
    double inventory_after_demand = 0.0;
    double order_quantity = 0.0;  // 0 when no order placed
    long lead = -1;               // -1 when no order placed
    double holding_cost = 0.0;
    double backorder_cost = 0.0;
    double order_cost = 0.0;
  };

  explicit InventorySS(Params p) : p_(std::move(p)), costs_({1.0, 0.5, 0.3}) {
    if (p_.theta < 0.0) throw ConfigError("sscont: theta must be nonnegative");
    if (p_.lead_mean < 0.0) throw ConfigError("sscont: lead_mean must be nonnegative");
    if (p_.horizon_days.size() != 3) throw ConfigError("sscont: expected three horizons");
    for (std::size_t i = 1; i < p_.horizon_days.size(); ++i)
      if (p_.horizon_days[i] > p_.horizon_days[i - 1])
        throw ConfigError("sscont: horizons must not increase with level");
  }

  std::string name() const override { return "sscont"; }
  int dimension() const override { return 2; }
  int num_levels() const override { return 3; }
  const CostVector& costs() const override { return costs_; }

  std::optional<Box> bounds() const override {
    const double inf = std::numeric_limits<double>::infinity();
    return Box{Point{0.0, 0.0}, Point{inf, inf}};
  }

  double evaluate(const Point& x, FidelityLevel level, const Replication& rep) const override {
    check_level(level);
    const double s = std::max(0.0, x[0]);
    const double S = std::max(s, x[1]);  // projection onto s <= S
    ReplicationStream stream = rep.shared();
    return simulate(s, S, p_.horizon_days[static_cast<std::size_t>(level)], stream);
  }

  /// Runs the discrete-event loop for `days` periods; optionally records a
  /// per-period trace. Requires s <= S and days >= 1.
  double simulate(double s, double S, int days, ReplicationStream& stream,
                  std::vector<PeriodRecord>* trace = nullptr) const;

  const Params& params() const { return p_; }

 private:
  Params p_;
  CostVector costs_;
};

}  // namespace mfopt
