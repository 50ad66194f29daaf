#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mfopt/config.hpp"
#include "mfopt/problem.hpp"
#include "mfopt/solver.hpp"
#include "mfopt/trajectory.hpp"

namespace mfopt {

/// One benchmark instance: a problem, its start point, and optional
/// per-instance settings overriding the global ones.
struct ProblemSpec {
  std::string id;
  std::shared_ptr<const MultiFidelityProblem> problem;
  Point initial;
  std::optional<double> budget;
  std::optional<double> delta0;
  std::optional<double> delta_max;
  /// Best attainable level-0 value, for gap measurements. Filled from the
  /// problem's reference optimum when it has one, otherwise derived from the
  /// post-evaluated data.
  std::optional<double> reference_value;
};

struct ExperimentConfig {
  std::vector<std::string> solvers = {"astro_mfdf", "astro_df"};
  std::vector<ProblemSpec> problems;
  double budget = 500.0;
  int n_macroreps = 20;
  std::uint64_t master_seed = 12345;
  int jobs = 1;
  int n_post = 200;
  int curve_points = 101;
  double gap = 0.10;
  bool plots = false;
  bool keep_events = false;  // retain per-iteration logs on the run results
  std::string out_dir = "results";
  SolverConfig solver;
};

/// Post-evaluated objective along one trajectory, sampled on the shared
/// budget-fraction grid (piecewise-constant in the recommendation in force).
struct ProgressCurve {
  std::string solver_id;
  std::string problem_id;
  int rep = 0;
  std::vector<double> fractions;
  std::vector<double> values;
};

/// Mean and 95% confidence band across macro-replications (t-quantile at
/// n-1 degrees of freedom).
struct CurveBand {
  std::string solver_id;
  std::string problem_id;
  std::vector<double> fractions;
  std::vector<double> mean;
  std::vector<double> lo;
  std::vector<double> hi;
};

/// Fraction of (problem, macro-replication) pairs whose best-so-far
/// post-evaluated gap is within the threshold, per budget fraction.
struct SolvabilityProfile {
  std::string solver_id;
  std::vector<double> fractions;
  std::vector<double> fraction_solved;
};

struct PipelineResult {
  std::vector<Trajectory> trajectories;
  std::vector<ProgressCurve> curves;
  std::vector<CurveBand> bands;
  std::vector<SolvabilityProfile> profiles;
  std::map<std::string, double> references;  // problem id -> v*
  std::vector<RunResult> runs;               // populated when keep_events is set
};

/// Runs one (solver, problem, rep) optimization. Replication streams are a
/// function of (master seed, problem, rep) only, so solvers face identical
/// stochastic environments (common random numbers across solvers).
RunResult run_single(const std::string& solver_id, const ProblemSpec& spec,
                     const ExperimentConfig& cfg, int rep);

/// All (solver, problem, rep) runs; deterministic given the config,
/// regardless of the number of worker threads.
std::vector<Trajectory> run_experiment(const ExperimentConfig& cfg,
                                       std::vector<RunResult>* runs_out = nullptr);

/// Re-estimates every recommendation with fresh post-evaluation replications
/// (streams disjoint from all optimization streams) and samples each
/// trajectory on the budget-fraction grid.
std::vector<ProgressCurve> post_evaluate(const std::vector<Trajectory>& trajectories,
                                         const ExperimentConfig& cfg);

CurveBand aggregate_band(const std::vector<ProgressCurve>& curves, const std::string& solver_id,
                         const std::string& problem_id);

/// Reference values per problem: the declared optimum when present,
/// otherwise the best post-evaluated value refined with extra replications.
std::map<std::string, double> resolve_references(const std::vector<ProgressCurve>& curves,
                                                 const ExperimentConfig& cfg);

std::vector<SolvabilityProfile> solvability_profiles(
    const std::vector<ProgressCurve>& curves, const std::map<std::string, double>& references,
    const ExperimentConfig& cfg);

/// Full protocol: optimize, post-evaluate, aggregate, profile.
PipelineResult run_pipeline(const ExperimentConfig& cfg);

// Result files: trajectories.csv, curves.csv, profiles.csv; optional SVG
// plots. UTF-8, header row, '.' decimal separator, shortest round-trip
// number formatting.
void export_artifacts(const PipelineResult& result, const ExperimentConfig& cfg);
std::vector<Trajectory> import_trajectories(const std::string& path);
std::vector<ProgressCurve> import_curves(const std::string& path);

}  // namespace mfopt
