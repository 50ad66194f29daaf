#include "mfopt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>
#include <unordered_map>

#include <boost/math/distributions/students_t.hpp>

#include "mfopt/csv.hpp"
#include "mfopt/nelder_mead.hpp"
#include "mfopt/plots.hpp"

namespace mfopt {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t rep_seed(std::uint64_t master_seed, const std::string& problem_id, int rep) {
  // Solver-independent: every solver sees the same streams on a given
  // (problem, rep), the CRN convention for solver comparisons.
  std::uint64_t h = detail::hash_combine(master_seed, fnv1a(problem_id));
  return detail::hash_combine(h, static_cast<std::uint64_t>(rep));
}

std::uint64_t post_seed(std::uint64_t master_seed) {
  return detail::hash_combine(master_seed, 0x706f73745f65ULL);
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      body(i);
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min<int>(jobs, static_cast<int>(count));
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

const ProblemSpec& spec_by_id(const ExperimentConfig& cfg, const std::string& id) {
  for (const ProblemSpec& spec : cfg.problems)
    if (spec.id == id) return spec;
  throw ConfigError("unknown problem id in artifacts: " + id);
}

double resolved_budget(const ExperimentConfig& cfg, const ProblemSpec& spec) {
  return spec.budget.value_or(cfg.budget);
}

}  // namespace

RunResult run_single(const std::string& solver_id, const ProblemSpec& spec,
                     const ExperimentConfig& cfg, int rep) {
  SolverConfig sc = cfg.solver;
  if (spec.delta0) sc.delta0 = {*spec.delta0};
  if (spec.delta_max) sc.delta_max = *spec.delta_max;
  const double budget = resolved_budget(cfg, spec);
  const std::uint64_t seed = rep_seed(cfg.master_seed, spec.id, rep);

  RunResult result;
  if (solver_id == "astro_mfdf") {
    result = AstroMfdf(spec.problem, sc, seed).run(spec.initial, budget);
  } else if (solver_id == "astro_df") {
    result = astro_df_run(spec.problem, sc, seed, spec.initial, budget);
  } else if (solver_id == "nelder_mead") {
    result = nelder_mead_run(spec.problem, sc, seed, spec.initial, budget);
  } else {
    throw ConfigError("unknown solver: " + solver_id);
  }
  result.trajectory.solver_id = solver_id;
  result.trajectory.problem_id = spec.id;
  result.trajectory.rep = rep;
  result.trajectory.seed = seed;
  return result;
}

std::vector<Trajectory> run_experiment(const ExperimentConfig& cfg,
                                       std::vector<RunResult>* runs_out) {
  struct Task {
    std::string solver;
    const ProblemSpec* spec;
    int rep;
  };
  std::vector<Task> tasks;
  for (const std::string& solver : cfg.solvers)
    for (const ProblemSpec& spec : cfg.problems)
      for (int rep = 0; rep < cfg.n_macroreps; ++rep) tasks.push_back({solver, &spec, rep});

  std::vector<RunResult> results(tasks.size());
  parallel_for(tasks.size(), cfg.jobs, [&](std::size_t i) {
    const Task& task = tasks[i];
    try {
      results[i] = run_single(task.solver, *task.spec, cfg, task.rep);
    } catch (const std::exception& e) {
      // Per-run failures are recorded, not fatal: keep the initial point.
      std::cerr << "run failed (" << task.solver << ", " << task.spec->id << ", rep "
                << task.rep << "): " << e.what() << "\n";
      RunResult fallback;
      fallback.trajectory.solver_id = task.solver;
      fallback.trajectory.problem_id = task.spec->id;
      fallback.trajectory.rep = task.rep;
      fallback.trajectory.budget_limit = resolved_budget(cfg, *task.spec);
      fallback.trajectory.entries.emplace_back(0.0, task.spec->initial);
      results[i] = std::move(fallback);
    }
  });

  std::vector<Trajectory> trajectories;
  trajectories.reserve(results.size());
  for (RunResult& r : results) trajectories.push_back(r.trajectory);
  if (runs_out) *runs_out = std::move(results);
  return trajectories;
}

std::vector<ProgressCurve> post_evaluate(const std::vector<Trajectory>& trajectories,
                                         const ExperimentConfig& cfg) {
  if (trajectories.empty()) return {};
  const std::uint64_t seed = post_seed(cfg.master_seed);

  // Collect the distinct recommended points per problem, in first-appearance
  // order, and evaluate each once with fresh post-evaluation streams.
  struct ProblemBatch {
    std::vector<Point> points;
    std::unordered_map<Point, std::size_t, PointBitsHash, PointBitsEqual> index;
  };
  std::map<std::string, ProblemBatch> batches;
  for (const Trajectory& t : trajectories) {
    ProblemBatch& batch = batches[t.problem_id];
    for (const auto& [budget, point] : t.entries) {
      if (batch.index.emplace(point, batch.points.size()).second) batch.points.push_back(point);
    }
  }

  std::map<std::string, std::vector<double>> values;
  for (auto& [problem_id, batch] : batches) {
    const ProblemSpec& spec = spec_by_id(cfg, problem_id);
    std::vector<double>& out = values[problem_id];
    out.resize(batch.points.size());
    parallel_for(batch.points.size(), cfg.jobs, [&](std::size_t i) {
      const Point& x = batch.points[static_cast<std::size_t>(i)];
      double sum = 0.0;
      for (int j = 1; j <= cfg.n_post; ++j) {
        const Replication rep{seed, point_key(x), j, StreamScope::post_evaluation};
        sum += spec.problem->evaluate(x, 0, rep);
      }
      out[i] = sum / static_cast<double>(cfg.n_post);
    });
  }

  std::vector<ProgressCurve> curves;
  curves.reserve(trajectories.size());
  for (const Trajectory& t : trajectories) {
    const ProblemBatch& batch = batches[t.problem_id];
    const std::vector<double>& vals = values[t.problem_id];
    const double budget =
        t.budget_limit > 0.0 ? t.budget_limit : resolved_budget(cfg, spec_by_id(cfg, t.problem_id));
    ProgressCurve curve;
    curve.solver_id = t.solver_id;
    curve.problem_id = t.problem_id;
    curve.rep = t.rep;
    for (int i = 0; i < cfg.curve_points; ++i) {
      const double fraction =
          cfg.curve_points == 1 ? 1.0
                                : static_cast<double>(i) / static_cast<double>(cfg.curve_points - 1);
      const Point& rec = t.at_budget(fraction * budget);
      curve.fractions.push_back(fraction);
      curve.values.push_back(vals[batch.index.at(rec)]);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

CurveBand aggregate_band(const std::vector<ProgressCurve>& curves, const std::string& solver_id,
                         const std::string& problem_id) {
  std::vector<const ProgressCurve*> group;
  for (const ProgressCurve& c : curves)
    if (c.solver_id == solver_id && c.problem_id == problem_id) group.push_back(&c);
  if (group.empty()) throw ConfigError("aggregate_band: no curves for " + solver_id);

  CurveBand band;
  band.solver_id = solver_id;
  band.problem_id = problem_id;
  band.fractions = group.front()->fractions;
  const std::size_t P = band.fractions.size();
  const std::size_t n = group.size();

  double t_quantile = 0.0;
  if (n >= 2) {
    const boost::math::students_t dist(static_cast<double>(n - 1));
    t_quantile = boost::math::quantile(dist, 0.975);
  }

  for (std::size_t i = 0; i < P; ++i) {
    double mean = 0.0;
    for (const ProgressCurve* c : group) mean += c->values[i];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const ProgressCurve* c : group) var += (c->values[i] - mean) * (c->values[i] - mean);
    var = n >= 2 ? var / static_cast<double>(n - 1) : 0.0;
    const double half = t_quantile * std::sqrt(var / static_cast<double>(n));
    band.mean.push_back(mean);
    band.lo.push_back(mean - half);
    band.hi.push_back(mean + half);
  }
  return band;
}

std::map<std::string, double> resolve_references(const std::vector<ProgressCurve>& curves,
                                                 const ExperimentConfig& cfg) {
  std::map<std::string, double> refs;
  for (const ProblemSpec& spec : cfg.problems) {
    if (spec.reference_value) {
      refs[spec.id] = *spec.reference_value;
      continue;
    }
    if (auto opt = spec.problem->reference_optimum()) {
      refs[spec.id] = opt->second;
      continue;
    }
    // Data-derived reference: best post-evaluated value across all solvers
    // and reps, refined at the best point with extra replications.
    double best_value = std::numeric_limits<double>::infinity();
    for (const ProgressCurve& c : curves) {
      if (c.problem_id != spec.id) continue;
      for (double v : c.values) best_value = std::min(best_value, v);
    }
    if (!std::isfinite(best_value)) continue;  // no data for this problem
    // locate the point achieving the best value, then refine
    // (scan trajectories is not available here; refine by re-evaluating the
    // argmin recommendation via the curves' producing batch is equivalent,
    // so the refinement happens in run_pipeline where points are at hand)
    refs[spec.id] = best_value;
  }
  return refs;
}

std::vector<SolvabilityProfile> solvability_profiles(
    const std::vector<ProgressCurve>& curves, const std::map<std::string, double>& references,
    const ExperimentConfig& cfg) {
  std::vector<SolvabilityProfile> profiles;
  for (const std::string& solver : cfg.solvers) {
    SolvabilityProfile profile;
    profile.solver_id = solver;
    std::vector<const ProgressCurve*> group;
    for (const ProgressCurve& c : curves)
      if (c.solver_id == solver) group.push_back(&c);
    if (group.empty()) {
      profiles.push_back(std::move(profile));
      continue;
    }
    profile.fractions = group.front()->fractions;
    const std::size_t P = profile.fractions.size();
    profile.fraction_solved.assign(P, 0.0);

    for (const ProgressCurve* c : group) {
      const auto ref = references.find(c->problem_id);
      if (ref == references.end())
        throw MissingReference("no reference optimum for problem " + c->problem_id);
      const double v_star = ref->second;
      const double v0 = c->values.front();
      const double threshold = v_star + cfg.gap * (v0 - v_star);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < P; ++i) {
        best = std::min(best, c->values[i]);
        if (best <= threshold) profile.fraction_solved[i] += 1.0;
      }
    }
    for (double& f : profile.fraction_solved) f /= static_cast<double>(group.size());
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

PipelineResult run_pipeline(const ExperimentConfig& cfg) {
  PipelineResult result;
  if (cfg.keep_events) {
    result.trajectories = run_experiment(cfg, &result.runs);
  } else {
    result.trajectories = run_experiment(cfg);
  }
  result.curves = post_evaluate(result.trajectories, cfg);

  // References: declared optima, else data-derived with a refinement pass.
  result.references = resolve_references(result.curves, cfg);
  const std::uint64_t seed = post_seed(cfg.master_seed);
  for (const ProblemSpec& spec : cfg.problems) {
    if (spec.reference_value || spec.problem->reference_optimum()) continue;
    // find the recommendation achieving the best post value
    double best_value = std::numeric_limits<double>::infinity();
    const Point* best_point = nullptr;
    for (std::size_t ci = 0; ci < result.curves.size(); ++ci) {
      const ProgressCurve& c = result.curves[ci];
      if (c.problem_id != spec.id) continue;
      const Trajectory& t = result.trajectories[ci];
      const double budget = resolved_budget(cfg, spec);
      for (std::size_t i = 0; i < c.values.size(); ++i) {
        if (c.values[i] < best_value) {
          best_value = c.values[i];
          best_point = &t.at_budget(c.fractions[i] * budget);
        }
      }
    }
    if (!best_point) continue;
    const int refine_n = 10000;
    double sum = 0.0;
    for (int j = 1; j <= refine_n; ++j) {
      const Replication rep{seed, point_key(*best_point), j, StreamScope::post_evaluation};
      sum += spec.problem->evaluate(*best_point, 0, rep);
    }
    // never above the observed minimum, so gaps stay nonnegative
    result.references[spec.id] = std::min(best_value, sum / refine_n);
  }

  for (const std::string& solver : cfg.solvers)
    for (const ProblemSpec& spec : cfg.problems)
      result.bands.push_back(aggregate_band(result.curves, solver, spec.id));

  result.profiles = solvability_profiles(result.curves, result.references, cfg);
  return result;
}

void export_artifacts(const PipelineResult& result, const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out_dir);

  auto open = [&](const std::string& name) {
    std::ofstream out(fs::path(cfg.out_dir) / name, std::ios::binary);
    if (!out) throw IoError("cannot write " + (fs::path(cfg.out_dir) / name).string());
    return out;
  };

  std::size_t max_d = 0;
  for (const Trajectory& t : result.trajectories)
    for (const auto& [b, p] : t.entries) max_d = std::max(max_d, p.size());

  {
    auto out = open("trajectories.csv");
    out << "solver,problem,rep,budget";
    for (std::size_t i = 1; i <= max_d; ++i) out << ",x_" << i;
    out << "\n";
    for (const Trajectory& t : result.trajectories) {
      for (const auto& [budget, point] : t.entries) {
        out << t.solver_id << ',' << t.problem_id << ',' << t.rep << ','
            << format_double(budget);
        for (std::size_t i = 0; i < max_d; ++i)
          out << ',' << (i < point.size() ? format_double(point[i]) : "");
        out << "\n";
      }
    }
  }

  {
    auto out = open("curves.csv");
    out << "solver,problem,rep,budget_fraction,post_mean\n";
    for (const ProgressCurve& c : result.curves) {
      for (std::size_t i = 0; i < c.fractions.size(); ++i) {
        out << c.solver_id << ',' << c.problem_id << ',' << c.rep << ','
            << format_double(c.fractions[i]) << ',' << format_double(c.values[i]) << "\n";
      }
    }
  }

  {
    auto out = open("profiles.csv");
    out << "solver,budget_fraction,fraction_solved\n";
    for (const SolvabilityProfile& p : result.profiles) {
      for (std::size_t i = 0; i < p.fractions.size(); ++i) {
        out << p.solver_id << ',' << format_double(p.fractions[i]) << ','
            << format_double(p.fraction_solved[i]) << "\n";
      }
    }
  }

  if (cfg.plots) {
    std::map<std::string, std::vector<const CurveBand*>> by_problem;
    for (const CurveBand& band : result.bands) by_problem[band.problem_id].push_back(&band);
    for (const auto& [problem_id, bands] : by_problem) {
      write_curves_svg((fs::path(cfg.out_dir) / ("curves_" + problem_id + ".svg")).string(),
                       bands);
    }
    if (!result.profiles.empty())
      write_profiles_svg((fs::path(cfg.out_dir) / "profiles.svg").string(), result.profiles);
  }
}

std::vector<Trajectory> import_trajectories(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file: " + path);

  std::vector<Trajectory> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < 4) throw IoError("malformed trajectory row in " + path);
    const std::string& solver = fields[0];
    const std::string& problem = fields[1];
    const int rep = static_cast<int>(std::stol(fields[2]));
    const double budget = parse_double(fields[3]);
    Point x;
    for (std::size_t i = 4; i < fields.size(); ++i)
      if (!fields[i].empty()) x.push_back(parse_double(fields[i]));

    if (out.empty() || out.back().solver_id != solver || out.back().problem_id != problem ||
        out.back().rep != rep) {
      Trajectory t;
      t.solver_id = solver;
      t.problem_id = problem;
      t.rep = rep;
      out.push_back(std::move(t));
    }
    out.back().entries.emplace_back(budget, std::move(x));
  }
  return out;
}

std::vector<ProgressCurve> import_curves(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file: " + path);

  std::vector<ProgressCurve> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) throw IoError("malformed curve row in " + path);
    const int rep = static_cast<int>(std::stol(fields[2]));
    if (out.empty() || out.back().solver_id != fields[0] || out.back().problem_id != fields[1] ||
        out.back().rep != rep) {
      ProgressCurve c;
      c.solver_id = fields[0];
      c.problem_id = fields[1];
      c.rep = rep;
      out.push_back(std::move(c));
    }
    out.back().fractions.push_back(parse_double(fields[3]));
    out.back().values.push_back(parse_double(fields[4]));
  }
  return out;
}

}  // namespace mfopt
