#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "mfopt/config.hpp"
#include "mfopt/mfas.hpp"
#include "mfopt/problem.hpp"
#include "mfopt/trajectory.hpp"

namespace mfopt {

/// One multiplicative correlation-score update.
struct AlphaUpdate {
  int level = 0;
  double factor = 1.0;
};

/// Per-iteration record emitted by the trust-region solvers; the invariant
/// audit and the CSV event log both read from it.
struct IterationEvent {
  std::int64_t k = 0;
  char phase = 'B';       // 'A': lower-fidelity inner loop produced the step
  int source_level = -1;  // fidelity of the model that produced the candidate
  bool accepted = false;
  double rho = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> rho_t;  // per lower level, phase B only
  std::vector<double> delta;  // radii after the iteration, levels 0..q
  std::vector<double> alpha;  // correlation vector after the iteration, levels 1..q
  std::vector<AlphaUpdate> alpha_updates;
  Point incumbent;  // after the iteration
  double incumbent_estimate = std::numeric_limits<double>::quiet_NaN();
  double candidate_estimate = std::numeric_limits<double>::quiet_NaN();
  double spent = 0.0;
};

struct RunResult {
  Trajectory trajectory;
  std::vector<IterationEvent> events;
  double spent = 0.0;
  double budget_limit = 0.0;
  double max_single_charge = 0.0;
  double delta_max = 0.0;
  std::int64_t iterations = 0;
};

/// True when the estimated objective reduction clears the sufficient
/// reduction bar zeta * eta * delta0^2 (boundary inclusive). Gates
/// lower-fidelity-sourced candidates.
bool sufficient_reduction_check(double incumbent_estimate, double candidate_estimate,
                                double delta0, double zeta, double eta);

/// Adaptive-sampling multi-fidelity trust-region solver. Maintains one trust
/// region per fidelity level and a correlation vector gating the
/// lower-fidelity inner loops; all function estimates go through the MFAS
/// engine against a shared per-run replication cache.
class AstroMfdf {
 public:
  AstroMfdf(std::shared_ptr<const MultiFidelityProblem> problem, SolverConfig config,
            std::uint64_t master_seed);

  RunResult run(const Point& x0, double budget);

  /// Initial radii for this problem: configured values broadcast across
  /// levels, or the default 0.08 * |hi - lo| (1 when unbounded).
  std::vector<double> initial_radii() const;
  double resolved_delta_max() const;

 private:
  struct LfdfResult {
    Point candidate;
    bool success = false;
    double rho = std::numeric_limits<double>::quiet_NaN();
    double incumbent_estimate = std::numeric_limits<double>::quiet_NaN();
    double candidate_estimate = std::numeric_limits<double>::quiet_NaN();
  };

  struct RunState;

  LfdfResult astro_lfdf(int t, RunState& rs, double lambda_k,
                        std::vector<AlphaUpdate>& updates);
  IterationEvent step(RunState& rs, std::int64_t k);

  std::shared_ptr<const MultiFidelityProblem> problem_;
  SolverConfig config_;
  std::uint64_t master_seed_;
};

/// Single-fidelity baseline: the same state machine restricted to level 0,
/// where adaptive sampling degenerates to plain MC sizing.
RunResult astro_df_run(std::shared_ptr<const MultiFidelityProblem> problem,
                       const SolverConfig& config, std::uint64_t master_seed, const Point& x0,
                       double budget);

/// Checks the trust-region invariants on a run's event log; returns a
/// human-readable violation description, empty when clean.
std::string audit_events(const RunResult& result, const SolverConfig& config);

}  // namespace mfopt
