#include "mfopt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfopt/local_model.hpp"

namespace mfopt {

namespace {
struct BudgetStop {};
}  // namespace

bool sufficient_reduction_check(double incumbent_estimate, double candidate_estimate,
                                double delta0, double zeta, double eta) {
  return incumbent_estimate - candidate_estimate >= zeta * eta * delta0 * delta0;
}

AstroMfdf::AstroMfdf(std::shared_ptr<const MultiFidelityProblem> problem, SolverConfig config,
                     std::uint64_t master_seed)
    : problem_(std::move(problem)), config_(std::move(config)), master_seed_(master_seed) {
  config_.validate();
}

std::vector<double> AstroMfdf::initial_radii() const {
  const int levels = problem_->num_levels();
  std::vector<double> radii(static_cast<std::size_t>(levels));
  if (config_.delta0.empty() || (config_.delta0.size() == 1 && config_.delta0[0] <= 0.0)) {
    double d0 = 1.0;
    if (auto box = problem_->bounds()) {
      const double diag = box->diagonal();
      if (std::isfinite(diag) && diag > 0.0) d0 = 0.08 * diag;
    }
    std::fill(radii.begin(), radii.end(), d0);
  } else if (config_.delta0.size() == 1) {
    std::fill(radii.begin(), radii.end(), config_.delta0[0]);
  } else {
    if (config_.delta0.size() != static_cast<std::size_t>(levels))
      throw ConfigError("delta0 must be scalar or one entry per fidelity level");
    radii = config_.delta0;
    for (int i = 1; i < levels; ++i)
      if (radii[static_cast<std::size_t>(i)] > radii[static_cast<std::size_t>(i - 1)])
        throw ConfigError("delta0 entries must not increase with the level index");
  }
  return radii;
}

double AstroMfdf::resolved_delta_max() const {
  if (config_.delta_max > 0.0) return config_.delta_max;
  return 10.0 * initial_radii()[0];
}

struct AstroMfdf::RunState {
  RunState(const MultiFidelityProblem& problem, const SolverConfig& cfg, std::uint64_t seed,
           double budget)
      : cache(problem.num_levels()), ledger(budget, problem.costs()),
        engine(problem, cfg, seed, cache, ledger) {}

  Point incumbent;
  std::vector<double> radii;   // levels 0..q
  std::vector<double> alpha;   // levels 1..q (index level-1)
  double delta_max = 0.0;
  SampleCache cache;
  BudgetLedger ledger;
  MfasEngine engine;
};

namespace {

Point clamp_to_bounds(const MultiFidelityProblem& problem, Point x) {
  if (auto box = problem.bounds()) return box->clamp(std::move(x));
  return x;
}

}  // namespace

AstroMfdf::LfdfResult AstroMfdf::astro_lfdf(int t, RunState& rs, double lambda_k,
                                            std::vector<AlphaUpdate>& updates) {
  LfdfResult res;
  res.candidate = rs.incumbent;

  auto mfas_value = [&](const Point& x, int target_level, double delta) {
    SamplingTarget tgt{x, target_level, delta, lambda_k, config_.kappa, config_.sigma_lb};
    const MfasOutput out = rs.engine.estimate(tgt);
    if (out.budget_exhausted) throw BudgetStop{};
    return out.estimate;
  };

  while (true) {
    double& alpha_t = rs.alpha[static_cast<std::size_t>(t - 1)];
    double& delta_t = rs.radii[static_cast<std::size_t>(t)];
    if (alpha_t < config_.alpha_th || delta_t < config_.delta_floor) return res;

    const DesignSet design = design_set(rs.incumbent, delta_t, problem_->bounds());
    std::vector<double> estimates;
    estimates.reserve(design.points.size());
    for (const Point& p : design.points) estimates.push_back(mfas_value(p, t, delta_t));

    const LocalModel model = fit_model(design, estimates);
    const Point candidate =
        clamp_to_bounds(*problem_, minimize_model(model, delta_t));

    const double f_cand = mfas_value(candidate, 0, delta_t);
    const double f_inc = mfas_value(rs.incumbent, 0, delta_t);
    const double model_reduction = model.value - model.evaluate(candidate);
    const double delta0 = rs.radii[0];
    const double denom = std::max(config_.zeta * delta0 * delta0, model_reduction);
    const double rho = (f_inc - f_cand) / denom;

    if (rho >= config_.eta &&
        sufficient_reduction_check(f_inc, f_cand, delta0, config_.zeta, config_.eta)) {
      res.candidate = candidate;
      res.success = true;
      res.rho = rho;
      res.incumbent_estimate = f_inc;
      res.candidate_estimate = f_cand;
      return res;
    }
    res.rho = rho;
    delta_t *= config_.gamma2;
    alpha_t *= config_.gamma2;
    updates.push_back(AlphaUpdate{t, config_.gamma2});
  }
}

IterationEvent AstroMfdf::step(RunState& rs, std::int64_t k) {
  const int q = problem_->max_level();
  const double lambda_k = lambda_at(config_, static_cast<double>(k));

  IterationEvent ev;
  ev.k = k;

  // Lower-fidelity inner loops, cheapest fidelity first.
  for (int t = q; t >= 1; --t) {
    const LfdfResult res = astro_lfdf(t, rs, lambda_k, ev.alpha_updates);
    if (!res.success) continue;

    rs.incumbent = res.candidate;
    double& delta_t = rs.radii[static_cast<std::size_t>(t)];
    delta_t = std::min(delta_t * config_.gamma1, rs.delta_max);
    rs.alpha[static_cast<std::size_t>(t - 1)] *= config_.gamma1;
    ev.alpha_updates.push_back(AlphaUpdate{t, config_.gamma1});
    // Keep higher-fidelity regions at least as large.
    for (int j = 0; j < t; ++j)
      rs.radii[static_cast<std::size_t>(j)] =
          std::max(rs.radii[static_cast<std::size_t>(j)], delta_t);

    ev.phase = 'A';
    ev.source_level = t;
    ev.accepted = true;
    ev.rho = res.rho;
    ev.incumbent_estimate = res.incumbent_estimate;
    ev.candidate_estimate = res.candidate_estimate;
    ev.delta = rs.radii;
    ev.alpha = rs.alpha;
    ev.incumbent = rs.incumbent;
    ev.spent = rs.ledger.spent();
    return ev;
  }

  // All inner loops skipped or failed: single shared design set at the
  // level-0 radius, one model per fidelity.
  ev.phase = 'B';
  const double delta0 = rs.radii[0];

  auto mfas_value = [&](const Point& x, int target_level) {
    SamplingTarget tgt{x, target_level, delta0, lambda_k, config_.kappa, config_.sigma_lb};
    const MfasOutput out = rs.engine.estimate(tgt);
    if (out.budget_exhausted) throw BudgetStop{};
    return out.estimate;
  };

  const DesignSet design = design_set(rs.incumbent, delta0, problem_->bounds());

  std::vector<LocalModel> models;
  std::vector<Point> candidates;
  for (int t = 0; t <= q; ++t) {
    std::vector<double> estimates;
    estimates.reserve(design.points.size());
    // The t=0 sweep pulls lower-level replications in through the MFMC
    // corrections, so the later sweeps mostly reuse cached samples.
    for (const Point& p : design.points) estimates.push_back(mfas_value(p, t));
    models.push_back(fit_model(design, estimates));
    candidates.push_back(clamp_to_bounds(*problem_, minimize_model(models.back(), delta0)));
  }

  const double f_inc = mfas_value(rs.incumbent, 0);
  std::vector<double> f_cand(static_cast<std::size_t>(q + 1));
  for (int t = 0; t <= q; ++t)
    f_cand[static_cast<std::size_t>(t)] = mfas_value(candidates[static_cast<std::size_t>(t)], 0);

  int best_t = 0;
  for (int t = 1; t <= q; ++t)
    if (f_cand[static_cast<std::size_t>(t)] < f_cand[static_cast<std::size_t>(best_t)]) best_t = t;

  // Correlation-score updates from each lower-fidelity model's own success.
  ev.rho_t.assign(static_cast<std::size_t>(q), std::numeric_limits<double>::quiet_NaN());
  for (int t = 1; t <= q; ++t) {
    const LocalModel& m = models[static_cast<std::size_t>(t)];
    const double reduction = m.value - m.evaluate(candidates[static_cast<std::size_t>(t)]);
    const double denom = std::max(config_.zeta * delta0 * delta0, reduction);
    const double rho_t = (f_inc - f_cand[static_cast<std::size_t>(t)]) / denom;
    ev.rho_t[static_cast<std::size_t>(t - 1)] = rho_t;
    const double factor = rho_t >= config_.eta ? config_.gamma1 : config_.gamma2;
    rs.alpha[static_cast<std::size_t>(t - 1)] *= factor;
    ev.alpha_updates.push_back(AlphaUpdate{t, factor});
  }

  const LocalModel& model0 = models[0];
  const double model0_reduction = model0.value - model0.evaluate(candidates[0]);
  const double rho = model0_reduction > 0.0
                         ? (f_inc - f_cand[static_cast<std::size_t>(best_t)]) / model0_reduction
                         : -std::numeric_limits<double>::infinity();
  const bool certified = config_.mu * model0.gradient_norm() >= delta0;

  ev.rho = rho;
  ev.source_level = best_t;
  ev.incumbent_estimate = f_inc;
  ev.candidate_estimate = f_cand[static_cast<std::size_t>(best_t)];

  if (rho >= config_.eta && certified) {
    rs.incumbent = candidates[static_cast<std::size_t>(best_t)];
    rs.radii[0] = std::min(config_.gamma1 * delta0, rs.delta_max);
    ev.accepted = true;
  } else {
    rs.radii[0] = config_.gamma2 * delta0;
  }
  for (int t = 1; t <= q; ++t)
    rs.radii[static_cast<std::size_t>(t)] =
        std::min(rs.radii[static_cast<std::size_t>(t)], rs.radii[0]);

  ev.delta = rs.radii;
  ev.alpha = rs.alpha;
  ev.incumbent = rs.incumbent;
  ev.spent = rs.ledger.spent();
  return ev;
}

RunResult AstroMfdf::run(const Point& x0, double budget) {
  if (static_cast<int>(x0.size()) != problem_->dimension())
    throw ConfigError("initial point dimension mismatch");
  if (!all_finite(x0)) throw NonFinite("initial point has non-finite entries");

  RunState rs(*problem_, config_, master_seed_, budget);
  rs.incumbent = clamp_to_bounds(*problem_, x0);
  rs.radii = initial_radii();
  rs.delta_max = resolved_delta_max();
  rs.radii[0] = std::min(rs.radii[0], rs.delta_max);
  rs.alpha.assign(static_cast<std::size_t>(problem_->max_level()), config_.alpha0);

  RunResult result;
  result.budget_limit = budget;
  result.trajectory.seed = master_seed_;
  result.trajectory.budget_limit = budget;
  result.trajectory.entries.emplace_back(0.0, rs.incumbent);

  std::int64_t k = 0;
  while (!rs.ledger.exhausted() && k < config_.max_iterations) {
    try {
      IterationEvent ev = step(rs, k);
      result.events.push_back(std::move(ev));
      if (result.events.back().accepted)
        result.trajectory.entries.emplace_back(rs.ledger.spent(), rs.incumbent);
    } catch (const BudgetStop&) {
      break;  // in-flight iteration discarded; incumbent unchanged
    }
    ++k;
  }

  result.iterations = k;
  result.spent = rs.ledger.spent();
  result.max_single_charge = rs.ledger.max_single_charge();
  result.delta_max = rs.delta_max;
  return result;
}

RunResult astro_df_run(std::shared_ptr<const MultiFidelityProblem> problem,
                       const SolverConfig& config, std::uint64_t master_seed, const Point& x0,
                       double budget) {
  auto restricted = std::make_shared<LevelRestrictedProblem>(std::move(problem), 1);
  AstroMfdf solver(restricted, config, master_seed);
  return solver.run(x0, budget);
}

std::string audit_events(const RunResult& result, const SolverConfig& config) {
  std::ostringstream out;
  const double tol = 1e-9;
  for (const IterationEvent& ev : result.events) {
    for (std::size_t i = 1; i < ev.delta.size(); ++i) {
      if (ev.delta[i] > ev.delta[i - 1] * (1.0 + tol)) {
        out << "k=" << ev.k << ": radius ordering violated at level " << i << "\n";
      }
    }
    if (!ev.delta.empty() && ev.delta[0] > result.delta_max * (1.0 + tol)) {
      out << "k=" << ev.k << ": level-0 radius exceeds delta_max\n";
    }
    for (const AlphaUpdate& u : ev.alpha_updates) {
      if (u.factor != config.gamma1 && u.factor != config.gamma2) {
        out << "k=" << ev.k << ": alpha update factor " << u.factor
            << " is neither gamma1 nor gamma2\n";
      }
    }
    if (ev.accepted && !(ev.candidate_estimate <= ev.incumbent_estimate)) {
      out << "k=" << ev.k << ": accepted candidate estimate above incumbent estimate\n";
    }
  }
  return out.str();
}

}  // namespace mfopt
