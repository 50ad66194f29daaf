#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "mfopt/errors.hpp"

namespace mfopt {

/// Trust-region and adaptive-sampling parameters. Every field is exposed in
/// the config schema; the defaults are conventional stochastic-DFO choices.
struct SolverConfig {
  // Trust region geometry. delta0/delta_max <= 0 means "derive from the
  // problem": delta0 = 0.08 * |hi - lo| (1 when unbounded), delta_max =
  // 10 * delta0.
  std::vector<double> delta0;
  double delta_max = 0.0;

  double eta = 0.1;       // success threshold in (0,1)
  double mu = 100.0;      // gradient certification multiplier
  double gamma1 = 1.5;    // expansion factor, > 1
  double gamma2 = 0.75;   // shrinkage factor, in (0,1)
  double kappa = 1.0;     // adaptive sampling constant
  double zeta = 0.1;      // sufficient reduction constant
  double sigma_lb = 1e-3; // variance estimate floor

  double alpha0 = 1.0;    // initial correlation score per lower level
  double alpha_th = 0.5;  // correlation threshold gating low-fidelity models

  // Sample-size lower bound schedule: lambda_k = max(lambda_min,
  // lambda_c * ln(k + 2)); grows like log k and never starts at zero.
  double lambda_min = 2.0;
  double lambda_c = 2.0;

  // Fraction of the current buffer queried per refinement batch; 0 reproduces
  // strict one-at-a-time sequential sampling.
  double mfas_growth = 0.1;

  // While refining on the MC path, lower-fidelity buffers are topped up to
  // this fraction of the target-level count so covariance estimates keep
  // improving and the MC-vs-MFMC choice can be revisited. 0 disables the
  // top-up (lower levels then stay at the initial fill).
  double mfas_mc_pairing_fraction = 0.1;

  // Radius floor below which a lower-fidelity inner loop gives up and the
  // level is skipped via its alpha score.
  double delta_floor = 1e-8;

  std::int64_t max_iterations = 1000000;

  // Nelder-Mead: fixed per-point replication count and initial simplex step.
  int nm_replications = 30;
  double nm_initial_step = 0.05;

  void validate() const {
    if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must be in (0,1)");
    if (!(mu > 0.0)) throw ConfigError("mu must be positive");
    if (!(gamma1 > 1.0)) throw ConfigError("gamma1 must exceed 1");
    if (!(gamma2 > 0.0 && gamma2 < 1.0)) throw ConfigError("gamma2 must be in (0,1)");
    if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
    if (!(zeta > 0.0)) throw ConfigError("zeta must be positive");
    if (!(sigma_lb > 0.0)) throw ConfigError("sigma_lb must be positive");
    if (!(alpha0 > 0.0)) throw ConfigError("alpha0 must be positive");
    if (!(alpha_th > 0.0)) throw ConfigError("alpha_th must be positive");
    if (!(lambda_min >= 1.0)) throw ConfigError("lambda_min must be at least 1");
    if (!(lambda_c > 0.0)) throw ConfigError("lambda_c must be positive");
    if (mfas_growth < 0.0) throw ConfigError("mfas_growth must be nonnegative");
    if (mfas_mc_pairing_fraction < 0.0)
      throw ConfigError("mfas_mc_pairing_fraction must be nonnegative");
    if (nm_replications < 1) throw ConfigError("nm_replications must be at least 1");
    for (double d : delta0)
      if (d < 0.0) throw ConfigError("delta0 entries must be nonnegative");
  }
};

/// Sample-size lower bound at iteration k; nondecreasing in k.
inline double lambda_at(const SolverConfig& cfg, double k) {
  if (k < 0.0) throw ConfigError("lambda_at: negative iteration index");
  return std::max(cfg.lambda_min, cfg.lambda_c * std::log(k + 2.0));
}

}  // namespace mfopt
