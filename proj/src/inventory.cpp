#include "mfopt/inventory.hpp"

#include <deque>

namespace mfopt {

double InventorySS::simulate(double s, double S, int days, ReplicationStream& stream,
                             std::vector<PeriodRecord>* trace) const {
  if (days < 1) throw InvalidHorizon("sscont: horizon must be at least one period");
  if (s > S) throw ConfigError("sscont: requires s <= S");

  double inventory = S;  // net inventory; negative means backorders
  double on_order = 0.0;
  std::deque<std::pair<int, double>> pipeline;  // (arrival day, quantity), FIFO by day
  double total_cost = 0.0;

  for (int day = 1; day <= days; ++day) {
    PeriodRecord rec;

    // Receive every order due by today.
    while (!pipeline.empty() && pipeline.front().first <= day) {
      inventory += pipeline.front().second;
      on_order -= pipeline.front().second;
      pipeline.pop_front();
    }

    // Demand; unmet demand is backordered.
    const double demand = stream.exponential(p_.theta);
    inventory -= demand;
    rec.demand = demand;
    rec.inventory_after_demand = inventory;

    rec.holding_cost = p_.holding_cost * std::max(inventory, 0.0);
    rec.backorder_cost = p_.backorder_cost * std::max(-inventory, 0.0);
    total_cost += rec.holding_cost + rec.backorder_cost;

    // Review: order up to S whenever the position drops below s.
    const double position = inventory + on_order;
    if (position < s) {
      const double qty = S - position;
      const long lead = stream.poisson(p_.lead_mean);
      rec.order_quantity = qty;
      rec.lead = lead;
      rec.order_cost = p_.order_fixed_cost + p_.order_unit_cost * qty;
      total_cost += rec.order_cost;
      if (lead == 0) {
        inventory += qty;  // same-period delivery
      } else {
        on_order += qty;
        // Pipeline stays sorted: Poisson leads on a FIFO queue can go out of
        // order, so insert by arrival day.
        const int arrival = day + static_cast<int>(lead);
        auto it = pipeline.begin();
        while (it != pipeline.end() && it->first <= arrival) ++it;
        pipeline.insert(it, {arrival, qty});
      }
    }

    if (trace) trace->push_back(rec);
  }

  return total_cost / static_cast<double>(days);
}

}  // namespace mfopt
