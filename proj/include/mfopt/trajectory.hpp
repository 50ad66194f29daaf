#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mfopt/point.hpp"

namespace mfopt {

/// Time-stamped recommended-solution history of one optimization run. The
/// first entry is the initial point at budget 0; budget is strictly
/// increasing down the list.
struct Trajectory {
  std::string solver_id;
  std::string problem_id;
  int rep = 0;
  std::uint64_t seed = 0;
  double budget_limit = 0.0;
  std::vector<std::pair<double, Point>> entries;

  /// Recommendation in force after `budget` units were spent.
  const Point& at_budget(double budget) const {
    std::size_t best = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].first <= budget) best = i;
    }
    return entries[best].second;
  }
};

}  // namespace mfopt
