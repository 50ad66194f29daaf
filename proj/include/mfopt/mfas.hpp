#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mfopt/budget.hpp"
#include "mfopt/config.hpp"
#include "mfopt/estimators.hpp"
#include "mfopt/problem.hpp"
#include "mfopt/samples.hpp"

namespace mfopt {

/// One adaptive-sampling request: estimate the target-level function at a
/// point to a precision tied to the current trust-region radius, with
/// estimator variance at most kappa^2 delta^4 / lambda_k.
struct SamplingTarget {
  Point point;
  int target_level = 0;
  double delta = 1.0;
  double lambda_k = 2.0;
  double kappa = 1.0;
  double sigma_lb = 1e-3;

  double target_variance() const {
    const double d2 = delta * delta;
    return kappa * kappa * d2 * d2 / lambda_k;
  }
};

enum class SamplingMethod { MC, MFMC };

/// Result of the sample-allocation solve: cost-minimal sizes meeting the
/// variance target, plus the MC-vs-MFMC decision. Entry r of the size
/// vectors corresponds to level target + r.
struct AllocationResult {
  std::vector<std::int64_t> n_star;
  std::vector<double> c_star;
  double predicted_mfmc_cost = 0.0;
  double predicted_mc_cost = 0.0;
  std::int64_t mc_size = 0;
  SamplingMethod chosen_method = SamplingMethod::MC;
};

/// Plain-MC size needed for the variance target: ceil(max(sigma_lb,
/// sigma_hat)^2 * lambda / (kappa^2 delta^4)), never below 1.
std::int64_t mc_required_size(double sigma_hat, const SamplingTarget& target);

/// Minimizes total query cost subject to the plug-in variance target, the
/// size ordering n^i <= n^{i+1}, and the already-available sizes as lower
/// bounds. Coefficients are fixed at their variance-minimizing values; the
/// sizes come from an analytic continuous solve (clamped, re-scaled once to
/// bind the variance constraint, rounded up) followed by a short projected
/// coordinate-descent polish that keeps the cheaper of the two. `costs` spans
/// levels target..q.
AllocationResult solve_allocation(const Moments& moments, std::span<const double> costs,
                                  const SamplingTarget& target,
                                  std::span<const std::int64_t> current_n);

/// Highest fidelity (smallest offset r) whose buffer is deficient:
/// current[r] < n_star[r] - 1. Empty when no level is deficient, which tells
/// the caller to re-check the exit condition.
std::optional<int> next_fidelity_to_query(std::span<const std::int64_t> current,
                                          std::span<const std::int64_t> n_star);

/// Output of one adaptive-sampling call. When exit was regular (not budget
/// exhaustion), estimated_variance <= the request's target_variance.
struct MfasOutput {
  double estimate = 0.0;
  double estimated_variance = 0.0;
  SamplingMethod method_used = SamplingMethod::MC;
  std::vector<std::int64_t> sizes;       // buffer sizes per level target..q at exit
  std::vector<std::int64_t> used_sizes;  // sizes consumed by the returned estimator
  double budget_charged = 0.0;
  bool budget_exhausted = false;
};

/// Multi-fidelity adaptive sampling engine for one solver run. Owns nothing:
/// replication buffers live in the shared per-run cache (so re-visited points
/// resume from their existing samples) and every query is charged to the
/// run's ledger at batch time.
class MfasEngine {
 public:
  struct TraceRow {
    std::uint64_t point_key = 0;
    int target_level = 0;
    std::vector<std::int64_t> sizes;
    SamplingMethod method = SamplingMethod::MC;
    double plug_in_variance = 0.0;
    double target_variance = 0.0;
    double cumulative_cost = 0.0;
  };

  MfasEngine(const MultiFidelityProblem& problem, const SolverConfig& config,
             std::uint64_t master_seed, SampleCache& cache, BudgetLedger& ledger)
      : problem_(problem), config_(config), master_seed_(master_seed), cache_(cache),
        ledger_(ledger) {}

  /// Runs the adaptive loop: initial fill to three replications per level,
  /// then allocate / check / refine until the variance target is met or the
  /// budget runs out (returns the current estimate flagged in that case).
  MfasOutput estimate(const SamplingTarget& target);

  void set_trace(std::vector<TraceRow>* sink) { trace_ = sink; }

  const MultiFidelityProblem& problem() const { return problem_; }
  std::uint64_t master_seed() const { return master_seed_; }

 private:
  /// Grows the buffer at (point, level) to `n` replications, charging the
  /// ledger for the whole batch up front.
  void ensure_samples(const Point& x, LevelSamples& buf, int level, std::int64_t n);

  std::int64_t batch_size(std::int64_t current) const;

  const MultiFidelityProblem& problem_;
  const SolverConfig& config_;
  std::uint64_t master_seed_;
  SampleCache& cache_;
  BudgetLedger& ledger_;
  std::vector<TraceRow>* trace_ = nullptr;
};

}  // namespace mfopt
