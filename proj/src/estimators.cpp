#include "mfopt/estimators.hpp"

#include <cmath>

namespace mfopt {

double mc_mean(std::span<const double> samples) {
  if (samples.empty()) throw InsufficientSamples("mc_mean: need at least one sample");
  double s = 0.0;
  for (double v : samples) s += v;
  return s / static_cast<double>(samples.size());
}

double mc_variance(std::span<const double> samples) {
  if (samples.size() < 2) throw InsufficientSamples("mc_variance: need at least two samples");
  const double m = mc_mean(samples);
  double s = 0.0;
  for (double v : samples) s += (v - m) * (v - m);
  return s / static_cast<double>(samples.size());
}

double mc_covariance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw InsufficientSamples("mc_covariance: buffers must be CRN-paired (equal length)");
  if (a.size() < 2) throw InsufficientSamples("mc_covariance: need at least two pairs");
  const double ma = mc_mean(a);
  const double mb = mc_mean(b);
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - ma) * (b[j] - mb);
  return s / static_cast<double>(a.size());
}

Moments compute_moments(const LevelSamples& samples, int target_level) {
  const int q = samples.num_levels() - 1;
  if (target_level < 0 || target_level > q) throw InvalidLevel("compute_moments: bad target");
  Moments m;
  m.target_level = target_level;
  const auto target = samples.values(target_level);
  for (int level = target_level; level <= q; ++level) {
    const auto buf = samples.values(level);
    if (buf.size() < 2)
      throw InsufficientSamples("compute_moments: level with fewer than two samples");
    m.mean.push_back(mc_mean(buf));
    m.variance.push_back(mc_variance(buf));
    const std::int64_t paired =
        std::min(samples.size(target_level), samples.size(level));
    m.covariance.push_back(mc_covariance(target.subspan(0, static_cast<std::size_t>(paired)),
                                         buf.subspan(0, static_cast<std::size_t>(paired))));
    m.n_used.push_back(samples.size(level));
  }
  return m;
}

namespace {
void check_sizes(std::span<const std::int64_t> n, int entries) {
  if (static_cast<int>(n.size()) != entries)
    throw InsufficientSamples("size vector does not cover the level range");
  for (std::size_t r = 0; r < n.size(); ++r) {
    if (n[r] < 1) throw InsufficientSamples("sample sizes must be at least 1");
    if (r > 0 && n[r] < n[r - 1])
      throw NonMonotoneSizes("sample sizes must be nondecreasing toward lower fidelities");
  }
}
}  // namespace

double mfmc_estimate(const LevelSamples& samples, int target_level,
                     std::span<const std::int64_t> n, std::span<const double> c) {
  const int q = samples.num_levels() - 1;
  const int entries = q - target_level + 1;
  check_sizes(n, entries);
  if (static_cast<int>(c.size()) != entries - 1)
    throw InsufficientSamples("coefficient vector does not cover the correction terms");
  for (int r = 0; r < entries; ++r) {
    if (n[static_cast<std::size_t>(r)] > samples.size(target_level + r))
      throw InsufficientSamples("requested size exceeds available replications");
  }

  double est = mc_mean(samples.prefix(target_level, n[0]));
  for (int r = 1; r < entries; ++r) {
    const int level = target_level + r;
    const double coarse = mc_mean(samples.prefix(level, n[static_cast<std::size_t>(r)]));
    const double fine = mc_mean(samples.prefix(level, n[static_cast<std::size_t>(r - 1)]));
    est += c[static_cast<std::size_t>(r - 1)] * (coarse - fine);
  }
  return est;
}

double mfmc_variance(const Moments& moments, std::span<const std::int64_t> n,
                     std::span<const double> c) {
  const int entries = moments.num_entries();
  check_sizes(n, entries);
  if (static_cast<int>(c.size()) != entries - 1)
    throw InsufficientSamples("coefficient vector does not cover the correction terms");

  double var = moments.variance[0] / static_cast<double>(n[0]);
  for (int r = 1; r < entries; ++r) {
    const double gap = 1.0 / static_cast<double>(n[static_cast<std::size_t>(r - 1)]) -
                       1.0 / static_cast<double>(n[static_cast<std::size_t>(r)]);
    const double ci = c[static_cast<std::size_t>(r - 1)];
    var += gap * (ci * ci * moments.variance[static_cast<std::size_t>(r)] -
                  2.0 * ci * moments.covariance[static_cast<std::size_t>(r)]);
  }
  return var;
}

std::vector<double> optimal_coefficients(const Moments& moments, double sigma_lb) {
  const double var_floor = sigma_lb * sigma_lb;
  std::vector<double> c;
  for (int r = 1; r < moments.num_entries(); ++r) {
    const double var = moments.variance[static_cast<std::size_t>(r)];
    c.push_back(var < var_floor ? 0.0 : moments.covariance[static_cast<std::size_t>(r)] / var);
  }
  return c;
}

}  // namespace mfopt
