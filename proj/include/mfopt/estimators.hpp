#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mfopt/samples.hpp"

namespace mfopt {

// Plain Monte Carlo sample statistics with 1/n normalization.

double mc_mean(std::span<const double> samples);
double mc_variance(std::span<const double> samples);
/// Covariance of CRN-paired buffers; both spans must have the same length.
double mc_covariance(std::span<const double> a, std::span<const double> b);

/// Moment estimates for the levels at and below a target fidelity t. Entry r
/// corresponds to level t + r; covariance[r] pairs the target level with
/// level t + r over their common replication prefix (covariance[0] equals
/// variance[0]).
struct Moments {
  int target_level = 0;
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> covariance;
  std::vector<std::int64_t> n_used;

  int num_entries() const { return static_cast<int>(mean.size()); }
};

/// Computes Moments from the buffers; every level t..q needs at least two
/// samples.
Moments compute_moments(const LevelSamples& samples, int target_level);

/// Telescoping control-variate estimate over levels t..q. `n[r]` is the
/// sample size for level t+r (nondecreasing, within the buffers); `c[r-1]`
/// weights the level t+r correction term. With all c zero this is exactly
/// the plain MC mean of the first n[0] target-level samples.
double mfmc_estimate(const LevelSamples& samples, int target_level,
                     std::span<const std::int64_t> n, std::span<const double> c);

/// Variance model of the telescoping estimate at the given sizes and
/// coefficients, evaluated on (estimated or true) moments.
double mfmc_variance(const Moments& moments, std::span<const std::int64_t> n,
                     std::span<const double> c);

/// Variance-minimizing coefficients c[r-1] = cov[r] / var[r]. A level whose
/// variance estimate falls below sigma_lb^2 is degenerate and gets
/// coefficient 0.
std::vector<double> optimal_coefficients(const Moments& moments, double sigma_lb);

}  // namespace mfopt
