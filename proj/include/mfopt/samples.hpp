#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "mfopt/errors.hpp"
#include "mfopt/point.hpp"

namespace mfopt {

/// Replication buffers for one design point, one per fidelity level. Entry
/// j-1 of every level was generated with replication index j, so equal-index
/// entries are CRN-paired across levels and any prefix at one level pairs
/// with the same prefix at another. Buffers only grow.
class LevelSamples {
 public:
  explicit LevelSamples(int num_levels = 0)
      : buffers_(static_cast<std::size_t>(num_levels)) {}

  int num_levels() const { return static_cast<int>(buffers_.size()); }

  std::int64_t size(int level) const {
    return static_cast<std::int64_t>(buffers_.at(static_cast<std::size_t>(level)).size());
  }

  std::span<const double> values(int level) const {
    const auto& b = buffers_.at(static_cast<std::size_t>(level));
    return {b.data(), b.size()};
  }

  std::span<const double> prefix(int level, std::int64_t n) const {
    const auto& b = buffers_.at(static_cast<std::size_t>(level));
    if (n < 0 || n > static_cast<std::int64_t>(b.size()))
      throw InsufficientSamples("prefix exceeds buffer");
    return {b.data(), static_cast<std::size_t>(n)};
  }

  void append(int level, double value) {
    buffers_.at(static_cast<std::size_t>(level)).push_back(value);
  }

  /// Largest per-level sizes m with m monotone nondecreasing from `t` up and
  /// m[i] <= size(i): the usable sizes for a nested telescoping estimate over
  /// levels t..q built from these buffers.
  std::vector<std::int64_t> monotone_sizes(int t) const {
    const int q = num_levels() - 1;
    std::vector<std::int64_t> m(static_cast<std::size_t>(q - t + 1));
    std::int64_t cap = size(q);
    for (int level = q; level >= t; --level) {
      cap = std::min(cap, size(level));
      m[static_cast<std::size_t>(level - t)] = cap;
    }
    return m;
  }

 private:
  std::vector<std::vector<double>> buffers_;
};

/// Per-run replication store keyed by the exact bit patterns of the point, so
/// re-visited points resume from their existing buffers.
class SampleCache {
 public:
  explicit SampleCache(int num_levels) : num_levels_(num_levels) {}

  LevelSamples& at(const Point& x) {
    auto it = map_.find(x);
    if (it == map_.end()) it = map_.emplace(x, LevelSamples(num_levels_)).first;
    return it->second;
  }

  const LevelSamples* find(const Point& x) const {
    auto it = map_.find(x);
    return it == map_.end() ? nullptr : &it->second;
  }

  std::size_t num_points() const { return map_.size(); }
  int num_levels() const { return num_levels_; }

 private:
  int num_levels_;
  std::unordered_map<Point, LevelSamples, PointBitsHash, PointBitsEqual> map_;
};

}  // namespace mfopt
