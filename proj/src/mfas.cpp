#include "mfopt/mfas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfopt {

std::int64_t mc_required_size(double sigma_hat, const SamplingTarget& target) {
  if (sigma_hat < 0.0) throw ConfigError("mc_required_size: negative sigma");
  const double sigma = std::max(target.sigma_lb, sigma_hat);
  const double n = sigma * sigma / target.target_variance();
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(n)));
}

namespace {

// Variance of the telescoping estimator as sum_r a_r / n_r. The a_r telescope
// back to var[0]: a_0 = var0 + g_1, a_r = g_{r+1} - g_r, a_{R-1} = -g_{R-1},
// with g_r = c_r^2 var_r - 2 c_r cov_r.
std::vector<double> variance_weights(const Moments& m, std::span<const double> c,
                                     double var0_floor) {
  const int entries = m.num_entries();
  std::vector<double> g(static_cast<std::size_t>(entries), 0.0);
  for (int r = 1; r < entries; ++r) {
    const double ci = c[static_cast<std::size_t>(r - 1)];
    g[static_cast<std::size_t>(r)] =
        ci * ci * m.variance[static_cast<std::size_t>(r)] -
        2.0 * ci * m.covariance[static_cast<std::size_t>(r)];
  }
  std::vector<double> a(static_cast<std::size_t>(entries));
  const double var0 = std::max(m.variance[0], var0_floor);
  if (entries == 1) {
    a[0] = var0;
  } else {
    a[0] = var0 + g[1];
    for (int r = 1; r + 1 < entries; ++r)
      a[static_cast<std::size_t>(r)] = g[static_cast<std::size_t>(r + 1)] -
                                       g[static_cast<std::size_t>(r)];
    a[static_cast<std::size_t>(entries - 1)] = -g[static_cast<std::size_t>(entries - 1)];
  }
  return a;
}

double weighted_variance(std::span<const double> a, std::span<const double> n) {
  double v = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) v += a[r] / n[r];
  return v;
}

double total_cost(std::span<const double> w, std::span<const double> n) {
  double c = 0.0;
  for (std::size_t r = 0; r < w.size(); ++r) c += w[r] * n[r];
  return c;
}

void apply_bounds_and_ordering(std::vector<double>& n, std::span<const std::int64_t> lb) {
  for (std::size_t r = 0; r < n.size(); ++r)
    n[r] = std::max({n[r], static_cast<double>(lb[r]), 2.0});
  for (std::size_t r = 1; r < n.size(); ++r) n[r] = std::max(n[r], n[r - 1]);
}

// Continuous sizes -> feasible integer sizes: clamp, bind the variance
// constraint by one uniform upscale, round up, and repair the rare case where
// rounding with negative weights nudges the variance back above target.
std::vector<std::int64_t> integerize(std::vector<double> n, std::span<const double> a,
                                     std::span<const std::int64_t> lb, double target_var) {
  apply_bounds_and_ordering(n, lb);
  for (int pass = 0; pass < 64; ++pass) {
    const double v = weighted_variance(a, n);
    if (v <= target_var) break;
    const double scale = v / target_var * (pass == 0 ? 1.0 : 1.05);
    for (auto& x : n) x *= scale;
    apply_bounds_and_ordering(n, lb);
  }
  std::vector<std::int64_t> out(n.size());
  for (int pass = 0; pass < 64; ++pass) {
    for (std::size_t r = 0; r < n.size(); ++r)
      out[r] = static_cast<std::int64_t>(std::ceil(n[r]));
    std::vector<double> nd(out.begin(), out.end());
    if (weighted_variance(a, nd) <= target_var) break;
    for (auto& x : n) x *= 1.05;
    apply_bounds_and_ordering(n, lb);
  }
  return out;
}

// Integer descent from a feasible rounded solution: repeatedly try to shave
// one unit off an expensive level, restoring feasibility by growing cheaper
// levels minimally. Cost strictly decreases on every accepted move.
void integer_polish(std::vector<std::int64_t>& n, std::span<const double> a,
                    std::span<const double> w, std::span<const std::int64_t> lb,
                    double target_var) {
  const std::size_t R = n.size();
  if (R < 2) return;
  auto cost_of = [&](const std::vector<std::int64_t>& v) {
    double c = 0.0;
    for (std::size_t r = 0; r < R; ++r) c += w[r] * static_cast<double>(v[r]);
    return c;
  };
  auto variance_of = [&](const std::vector<std::int64_t>& v) {
    double s = 0.0;
    for (std::size_t r = 0; r < R; ++r) s += a[r] / static_cast<double>(v[r]);
    return s;
  };

  for (int pass = 0; pass < 500; ++pass) {
    bool improved = false;
    for (std::size_t r = 0; r + 1 < R; ++r) {
      std::vector<std::int64_t> cand = n;
      const std::int64_t low = std::max<std::int64_t>(
          {lb[r], 2, r > 0 ? cand[r - 1] : 2});
      if (cand[r] - 1 < low) continue;
      cand[r] -= 1;
      bool feasible = true;
      for (std::size_t j = r + 1; j < R; ++j) {
        double rest = 0.0;
        for (std::size_t i = 0; i < R; ++i)
          if (i != j) rest += a[i] / static_cast<double>(cand[i]);
        const double slack = target_var - rest;
        std::int64_t need = std::max<std::int64_t>({lb[j], 2, cand[j - 1]});
        if (a[j] > 0.0) {
          if (slack <= 0.0) {
            feasible = false;
            break;
          }
          need = std::max(need,
                          static_cast<std::int64_t>(std::ceil(a[j] / slack)));
        }
        cand[j] = need;  // minimal feasible is optimal for either sign of a_j
      }
      if (!feasible) continue;
      if (variance_of(cand) > target_var) continue;
      if (cost_of(cand) < cost_of(n)) {
        n = std::move(cand);
        improved = true;
      }
    }
    if (!improved) break;
  }
}

void polish(std::vector<double>& n, std::span<const double> a, std::span<const double> w,
            std::span<const std::int64_t> lb, double target_var) {
  const std::size_t R = n.size();
  for (int iter = 0; iter < 20; ++iter) {
    for (std::size_t rr = R; rr-- > 0;) {
      const double low = std::max({static_cast<double>(lb[rr]), 2.0,
                                   rr > 0 ? n[rr - 1] : 2.0});
      const double high =
          rr + 1 < R ? n[rr + 1] : std::numeric_limits<double>::infinity();
      if (low > high) continue;
      double rest = 0.0;
      for (std::size_t j = 0; j < R; ++j)
        if (j != rr) rest += a[j] / n[j];
      const double slack = target_var - rest;
      double candidate;
      if (a[rr] <= 0.0) {
        candidate = low;  // negative weight: smaller is cheaper and reduces variance
      } else if (slack <= 0.0) {
        continue;  // cannot satisfy locally; leave for other coordinates
      } else {
        candidate = std::clamp(a[rr] / slack, low, high);
      }
      n[rr] = candidate;
    }
  }
  (void)w;
}

}  // namespace

AllocationResult solve_allocation(const Moments& moments, std::span<const double> costs,
                                  const SamplingTarget& target,
                                  std::span<const std::int64_t> current_n) {
  const int entries = moments.num_entries();
  if (static_cast<int>(costs.size()) != entries || static_cast<int>(current_n.size()) != entries)
    throw ConfigError("solve_allocation: inconsistent level ranges");
  const double V = target.target_variance();

  AllocationResult result;
  result.mc_size = mc_required_size(std::sqrt(std::max(0.0, moments.variance[0])), target);
  result.predicted_mc_cost = costs[0] * static_cast<double>(result.mc_size);

  if (entries == 1) {
    result.n_star = {std::max<std::int64_t>(result.mc_size, std::max<std::int64_t>(current_n[0], 2))};
    result.c_star = {};
    result.predicted_mfmc_cost = costs[0] * static_cast<double>(result.n_star[0]);
    result.chosen_method = SamplingMethod::MC;
    return result;
  }

  result.c_star = optimal_coefficients(moments, target.sigma_lb);
  // The target-level variance is floored like the MC rule, so the two
  // predicted costs stay comparable when the plug-in variance degenerates.
  const std::vector<double> a =
      variance_weights(moments, result.c_star, target.sigma_lb * target.sigma_lb);

  // Analytic continuous relaxation: n_r proportional to sqrt(a_r / w_r),
  // scaled so the variance constraint binds.
  std::vector<double> base(static_cast<std::size_t>(entries));
  double base_max = 0.0;
  for (int r = 0; r < entries; ++r) {
    base[static_cast<std::size_t>(r)] =
        std::sqrt(std::max(a[static_cast<std::size_t>(r)], 0.0) / costs[static_cast<std::size_t>(r)]);
    base_max = std::max(base_max, base[static_cast<std::size_t>(r)]);
  }
  if (base_max <= 0.0) base_max = 1.0;
  for (auto& b : base) b = std::max(b, 1e-12 * base_max);
  double num = 0.0;
  for (int r = 0; r < entries; ++r)
    num += a[static_cast<std::size_t>(r)] / base[static_cast<std::size_t>(r)];
  const double scale = num > 0.0 ? num / V : 0.0;
  std::vector<double> analytic(base);
  for (auto& x : analytic) x *= scale;

  std::vector<std::int64_t> best = integerize(analytic, a, current_n, V);

  std::vector<double> polished(analytic);
  apply_bounds_and_ordering(polished, current_n);
  polish(polished, a, costs, current_n, V);
  std::vector<std::int64_t> alt = integerize(polished, a, current_n, V);

  auto int_cost = [&](const std::vector<std::int64_t>& n) {
    double c = 0.0;
    for (int r = 0; r < entries; ++r)
      c += costs[static_cast<std::size_t>(r)] * static_cast<double>(n[static_cast<std::size_t>(r)]);
    return c;
  };
  if (int_cost(alt) < int_cost(best)) best = std::move(alt);
  integer_polish(best, a, costs, current_n, V);

  result.n_star = std::move(best);
  result.predicted_mfmc_cost = int_cost(result.n_star);
  result.chosen_method = result.predicted_mfmc_cost <= result.predicted_mc_cost
                             ? SamplingMethod::MFMC
                             : SamplingMethod::MC;
  return result;
}

std::optional<int> next_fidelity_to_query(std::span<const std::int64_t> current,
                                          std::span<const std::int64_t> n_star) {
  for (std::size_t r = 0; r < current.size(); ++r) {
    if (current[r] < n_star[r] - 1) return static_cast<int>(r);
  }
  return std::nullopt;
}

void MfasEngine::ensure_samples(const Point& x, LevelSamples& buf, int level, std::int64_t n) {
  const std::int64_t have = buf.size(level);
  if (n <= have) return;
  ledger_.charge(level, n - have);
  for (std::int64_t j = have + 1; j <= n; ++j) {
    const Replication rep = make_replication(master_seed_, x, j);
    buf.append(level, problem_.evaluate(x, level, rep));
  }
}

std::int64_t MfasEngine::batch_size(std::int64_t current) const {
  const double grow = config_.mfas_growth * static_cast<double>(current);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(grow)));
}

MfasOutput MfasEngine::estimate(const SamplingTarget& target) {
  const int t = target.target_level;
  const int q = problem_.max_level();
  if (t < 0 || t > q) throw InvalidLevel("mfas: bad target level");
  const int entries = q - t + 1;
  const double spent_before = ledger_.spent();
  const double V = target.target_variance();

  LevelSamples& buf = cache_.at(target.point);
  std::vector<double> costs(static_cast<std::size_t>(entries));
  for (int r = 0; r < entries; ++r) costs[static_cast<std::size_t>(r)] = problem_.costs().at(t + r);

  auto current_sizes = [&]() {
    std::vector<std::int64_t> n(static_cast<std::size_t>(entries));
    for (int r = 0; r < entries; ++r) n[static_cast<std::size_t>(r)] = buf.size(t + r);
    return n;
  };

  auto finish = [&](SamplingMethod method, const std::vector<double>& c, bool exhausted) {
    MfasOutput out;
    out.method_used = method;
    out.budget_exhausted = exhausted;
    out.sizes = current_sizes();
    if (method == SamplingMethod::MC) {
      const auto values = buf.values(t);
      out.estimate = mc_mean(values);
      const double sigma = std::sqrt(mc_variance(values));
      const double floored = std::max(target.sigma_lb, sigma);
      out.estimated_variance = floored * floored / static_cast<double>(values.size());
      out.used_sizes.assign(static_cast<std::size_t>(entries), 0);
      out.used_sizes[0] = buf.size(t);
      for (int r = 1; r < entries; ++r) out.used_sizes[static_cast<std::size_t>(r)] = buf.size(t + r);
    } else {
      const auto m = buf.monotone_sizes(t);
      const Moments moments = compute_moments(buf, t);
      out.estimate = mfmc_estimate(buf, t, m, c);
      const double floor = target.sigma_lb * target.sigma_lb / static_cast<double>(m[0]);
      out.estimated_variance = std::max(mfmc_variance(moments, m, c), floor);
      out.used_sizes = m;
    }
    out.budget_charged = ledger_.spent() - spent_before;
    return out;
  };

  // Initial fill: at least three CRN replications at every level t..q.
  for (int level = t; level <= q; ++level) {
    if (buf.size(level) >= 3) continue;
    if (ledger_.exhausted()) {
      // Not enough samples for moments: fall back to whatever level-t data
      // exists, querying the minimum needed for a defined estimate.
      if (buf.size(t) < 1) ensure_samples(target.point, buf, t, 1);
      MfasOutput out;
      out.method_used = SamplingMethod::MC;
      out.budget_exhausted = true;
      out.sizes = current_sizes();
      out.used_sizes = out.sizes;
      out.estimate = mc_mean(buf.values(t));
      const double sigma =
          buf.size(t) >= 2 ? std::sqrt(mc_variance(buf.values(t))) : target.sigma_lb;
      const double floored = std::max(target.sigma_lb, sigma);
      out.estimated_variance = floored * floored / static_cast<double>(buf.size(t));
      out.budget_charged = ledger_.spent() - spent_before;
      return out;
    }
    ensure_samples(target.point, buf, level, 3);
  }

  while (true) {
    const Moments moments = compute_moments(buf, t);
    const auto sizes = current_sizes();
    const AllocationResult alloc = solve_allocation(moments, costs, target, sizes);

    double plug_in;
    if (alloc.chosen_method == SamplingMethod::MC) {
      const double sigma = std::max(target.sigma_lb, std::sqrt(std::max(0.0, moments.variance[0])));
      plug_in = sigma * sigma / static_cast<double>(buf.size(t));
    } else {
      const auto m = buf.monotone_sizes(t);
      plug_in = std::max(mfmc_variance(moments, m, alloc.c_star),
                         target.sigma_lb * target.sigma_lb / static_cast<double>(m[0]));
    }

    if (trace_) {
      trace_->push_back(TraceRow{point_key(target.point), t, sizes, alloc.chosen_method, plug_in,
                                 V, ledger_.spent()});
    }

    if (plug_in <= V) return finish(alloc.chosen_method, alloc.c_star, false);
    if (ledger_.exhausted()) return finish(alloc.chosen_method, alloc.c_star, true);

    if (alloc.chosen_method == SamplingMethod::MC) {
      const std::int64_t have = buf.size(t);
      ensure_samples(target.point, buf, t, have + batch_size(have));
      // Keep a growing CRN-paired subset at the lower levels so the
      // covariance estimates (and hence the method choice) can recover.
      if (config_.mfas_mc_pairing_fraction > 0.0) {
        const std::int64_t pair_target = std::min(
            buf.size(t),
            std::max<std::int64_t>(3, static_cast<std::int64_t>(std::ceil(
                                          config_.mfas_mc_pairing_fraction *
                                          static_cast<double>(buf.size(t))))));
        for (int level = t + 1; level <= q; ++level)
          if (buf.size(level) < pair_target)
            ensure_samples(target.point, buf, level, pair_target);
      }
    } else {
      int level_offset = 0;
      if (auto r = next_fidelity_to_query(sizes, alloc.n_star)) {
        level_offset = *r;
      } else {
        // All sizes within one of the allocation but the target is unmet:
        // refine whichever level still trails its allocation, else the
        // target level itself.
        for (int r = 0; r < entries; ++r) {
          if (sizes[static_cast<std::size_t>(r)] < alloc.n_star[static_cast<std::size_t>(r)]) {
            level_offset = r;
            break;
          }
        }
      }
      const int level = t + level_offset;
      const std::int64_t have = buf.size(level);
      ensure_samples(target.point, buf, level, have + batch_size(have));
    }
  }
}

}  // namespace mfopt
