#pragma once

#include <cmath>
#include <cstdint>

#include "mfopt/point.hpp"

namespace mfopt {

/// Substream selector within one replication. The `shared` substream is
/// identical no matter which fidelity level consumes it (common random
/// numbers); `level_private(i)` is private to fidelity level i.
struct SubstreamTag {
  enum class Kind : std::uint32_t { shared = 0, level_private = 1 };
  Kind kind = Kind::shared;
  std::uint32_t level = 0;

  static SubstreamTag shared() { return SubstreamTag{Kind::shared, 0}; }
  static SubstreamTag level_private(int lvl) {
    return SubstreamTag{Kind::level_private, static_cast<std::uint32_t>(lvl)};
  }

  std::uint64_t encoded() const {
    return (static_cast<std::uint64_t>(kind) << 32) | level;
  }
  bool operator==(const SubstreamTag&) const = default;
};

/// Stream namespaces. Optimization-time replications and post-evaluation
/// replications must never overlap, so the scope participates in the key.
enum class StreamScope : std::uint64_t { optimization = 0, post_evaluation = 1 };

/// Counter-based random stream: the whole sequence is a pure function of
/// (master_seed, point_key, replication_index, tag, scope). Draw i is
/// mix(key + i*gamma), so streams can be recreated anywhere, in any order,
/// and always replay bit-identically.
class ReplicationStream {
 public:
  ReplicationStream(std::uint64_t master_seed, std::uint64_t point_key,
                    std::int64_t replication_index, SubstreamTag tag,
                    StreamScope scope = StreamScope::optimization)
      : tag_(tag), scope_(scope) {
    std::uint64_t k = detail::hash_combine(0x6d666f70742d726eULL, master_seed);
    k = detail::hash_combine(k, point_key);
    k = detail::hash_combine(k, static_cast<std::uint64_t>(replication_index));
    // The shared substream must not depend on the consuming level.
    k = detail::hash_combine(k, tag.encoded());
    k = detail::hash_combine(k, static_cast<std::uint64_t>(scope));
    key_ = k;
  }

  SubstreamTag tag() const { return tag_; }
  StreamScope scope() const { return scope_; }

  std::uint64_t next_u64() {
    const std::uint64_t v = detail::mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
    ++counter_;
    return v;
  }

  /// Uniform draw in the open interval (0,1).
  double uniform() {
    // 53-bit mantissa, then nudge off exact zero.
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  /// Standard normal via the inverse CDF, so one uniform maps to exactly one
  /// normal draw and substream prefixes stay aligned across consumers.
  double normal() { return inverse_normal_cdf(uniform()); }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Exponential with the given mean (mean 0 yields identically zero draws).
  double exponential(double mean) { return -mean * std::log(uniform()); }

  /// Poisson count by uniform products; intended for small means.
  long poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    long k = 0;
    double p = 1.0;
    do {
      p *= uniform();
      ++k;
    } while (p > limit);
    return k - 1;
  }

  /// Acklam's rational approximation of the standard normal quantile
  /// (absolute error below 1.2e-9 over (0,1)).
  static double inverse_normal_cdf(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double q, r;
    if (p < p_low) {
      q = std::sqrt(-2.0 * std::log(p));
      return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
             ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
      q = p - 0.5;
      r = q * q;
      return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
             (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  SubstreamTag tag_;
  StreamScope scope_;
};

/// Handle for one CRN replication at a point: oracles mint the substreams
/// they need from it. Replication indices start at 1.
struct Replication {
  std::uint64_t master_seed = 0;
  std::uint64_t point_key = 0;
  std::int64_t index = 1;
  StreamScope scope = StreamScope::optimization;

  ReplicationStream shared() const {
    return ReplicationStream(master_seed, point_key, index, SubstreamTag::shared(), scope);
  }
  ReplicationStream level_private(int level) const {
    return ReplicationStream(master_seed, point_key, index, SubstreamTag::level_private(level),
                             scope);
  }
};

inline Replication make_replication(std::uint64_t master_seed, const Point& x, std::int64_t index,
                                    StreamScope scope = StreamScope::optimization) {
  return Replication{master_seed, point_key(x), index, scope};
}

inline ReplicationStream make_stream(std::uint64_t master_seed, const Point& x,
                                     std::int64_t replication_index, SubstreamTag tag,
                                     StreamScope scope = StreamScope::optimization) {
  return ReplicationStream(master_seed, point_key(x), replication_index, tag, scope);
}

}  // namespace mfopt
