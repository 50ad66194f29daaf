#include "mfopt/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "mfopt/budget.hpp"

namespace mfopt {

namespace {

struct BudgetStop {};

class Evaluator {
 public:
  Evaluator(const MultiFidelityProblem& problem, int replications, std::uint64_t seed,
            BudgetLedger& ledger)
      : problem_(problem), replications_(replications), seed_(seed), ledger_(ledger) {}

  double operator()(const Point& x) {
    auto it = cache_.find(x);
    if (it != cache_.end()) return it->second;
    if (ledger_.exhausted()) throw BudgetStop{};
    ledger_.charge(0, replications_);
    double sum = 0.0;
    for (int j = 1; j <= replications_; ++j)
      sum += problem_.evaluate(x, 0, make_replication(seed_, x, j));
    const double mean = sum / static_cast<double>(replications_);
    cache_.emplace(x, mean);
    return mean;
  }

 private:
  const MultiFidelityProblem& problem_;
  int replications_;
  std::uint64_t seed_;
  BudgetLedger& ledger_;
  std::unordered_map<Point, double, PointBitsHash, PointBitsEqual> cache_;
};

bool lex_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

RunResult nelder_mead_run(std::shared_ptr<const MultiFidelityProblem> problem,
                          const SolverConfig& config, std::uint64_t master_seed, const Point& x0,
                          double budget) {
  config.validate();
  const int d = problem->dimension();
  if (static_cast<int>(x0.size()) != d) throw ConfigError("initial point dimension mismatch");

  const auto box = problem->bounds();
  auto clamp = [&](Point p) { return box ? box->clamp(std::move(p)) : std::move(p); };

  RunResult result;
  result.budget_limit = budget;
  result.trajectory.seed = master_seed;
  result.trajectory.budget_limit = budget;

  BudgetLedger ledger(budget, problem->costs());
  Evaluator eval(*problem, config.nm_replications, master_seed, ledger);

  const Point start = clamp(x0);
  result.trajectory.entries.emplace_back(0.0, start);

  // Initial simplex: one vertex per coordinate, stepping by a fraction of the
  // box width (or of the coordinate magnitude when unbounded), flipped inward
  // when the step leaves the box.
  std::vector<Point> simplex{start};
  for (int i = 0; i < d; ++i) {
    double width = std::abs(start[static_cast<std::size_t>(i)]);
    if (box && std::isfinite(box->hi[static_cast<std::size_t>(i)]) &&
        std::isfinite(box->lo[static_cast<std::size_t>(i)]))
      width = box->hi[static_cast<std::size_t>(i)] - box->lo[static_cast<std::size_t>(i)];
    const double step = config.nm_initial_step * std::max(width, 1.0);
    Point v = start;
    v[static_cast<std::size_t>(i)] += step;
    v = clamp(std::move(v));
    if (PointBitsEqual{}(v, start)) {
      v = start;
      v[static_cast<std::size_t>(i)] -= step;
      v = clamp(std::move(v));
    }
    if (PointBitsEqual{}(v, start))
      throw DegenerateSimplex("nelder_mead: could not build a non-degenerate initial simplex");
    simplex.push_back(std::move(v));
  }

  std::vector<double> values(simplex.size());
  double best_value = std::numeric_limits<double>::infinity();

  auto record_best = [&](std::size_t idx) {
    if (values[idx] < best_value) {
      best_value = values[idx];
      result.trajectory.entries.emplace_back(ledger.spent(), simplex[idx]);
    }
  };

  // The initial simplex costs (d+1) * replications level-0 queries up front;
  // without budget for it the run returns the initial point untouched.
  if (budget < static_cast<double>(d + 1) *
                   static_cast<double>(config.nm_replications) * problem->costs().at(0)) {
    result.spent = 0.0;
    result.delta_max = std::numeric_limits<double>::infinity();
    return result;
  }

  try {
    for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = eval(simplex[i]);
    best_value = values[0];
    for (std::size_t i = 1; i < simplex.size(); ++i) record_best(i);

    int stalled = 0;
    while (!ledger.exhausted()) {
      // Once the simplex has collapsed every candidate hits the estimate
      // cache, nothing is charged, and no further progress is possible.
      const double spent_before = ledger.spent();

      // Sort vertices by estimate; lexicographic tie-break keeps runs
      // schedule-independent.
      std::vector<std::size_t> order(simplex.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return lex_less(simplex[a], simplex[b]);
      });
      std::vector<Point> sorted;
      std::vector<double> sorted_values;
      for (std::size_t idx : order) {
        sorted.push_back(simplex[idx]);
        sorted_values.push_back(values[idx]);
      }
      simplex = std::move(sorted);
      values = std::move(sorted_values);

      Point centroid(static_cast<std::size_t>(d), 0.0);
      for (int v = 0; v < d; ++v)
        for (int i = 0; i < d; ++i)
          centroid[static_cast<std::size_t>(i)] +=
              simplex[static_cast<std::size_t>(v)][static_cast<std::size_t>(i)] /
              static_cast<double>(d);

      const Point& worst = simplex.back();
      auto blend = [&](double coeff) {
        Point p(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i)
          p[static_cast<std::size_t>(i)] = centroid[static_cast<std::size_t>(i)] +
                                           coeff * (centroid[static_cast<std::size_t>(i)] -
                                                    worst[static_cast<std::size_t>(i)]);
        return clamp(std::move(p));
      };

      const Point reflected = blend(1.0);
      const double f_reflected = eval(reflected);

      if (f_reflected < values.front()) {
        const Point expanded = blend(2.0);
        const double f_expanded = eval(expanded);
        if (f_expanded < f_reflected) {
          simplex.back() = expanded;
          values.back() = f_expanded;
        } else {
          simplex.back() = reflected;
          values.back() = f_reflected;
        }
      } else if (f_reflected < values[values.size() - 2]) {
        simplex.back() = reflected;
        values.back() = f_reflected;
      } else {
        const bool outside = f_reflected < values.back();
        const Point contracted = blend(outside ? 0.5 : -0.5);
        const double f_contracted = eval(contracted);
        if (f_contracted < std::min(f_reflected, values.back())) {
          simplex.back() = contracted;
          values.back() = f_contracted;
        } else {
          // Shrink toward the best vertex.
          for (std::size_t v = 1; v < simplex.size(); ++v) {
            for (int i = 0; i < d; ++i)
              simplex[v][static_cast<std::size_t>(i)] =
                  0.5 * (simplex[v][static_cast<std::size_t>(i)] +
                         simplex[0][static_cast<std::size_t>(i)]);
            simplex[v] = clamp(std::move(simplex[v]));
            values[v] = eval(simplex[v]);
            record_best(v);
          }
        }
      }
      record_best(simplex.size() - 1);

      if (ledger.spent() == spent_before) {
        if (++stalled >= 100) break;
      } else {
        stalled = 0;
      }
    }
  } catch (const BudgetStop&) {
    // run ends with the recommendations collected so far
  }

  result.spent = ledger.spent();
  result.max_single_charge = ledger.max_single_charge();
  result.delta_max = std::numeric_limits<double>::infinity();
  result.iterations = 0;
  return result;
}

}  // namespace mfopt
