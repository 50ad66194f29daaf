#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace mfopt {

/// A design point in problem units. Length equals the problem dimension.
using Point = std::vector<double>;

inline bool all_finite(const Point& x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

inline double norm2(const Point& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Axis-aligned box constraint. Entries may be +-infinity for one-sided or
/// absent bounds.
struct Box {
  Point lo;
  Point hi;

  static Box unbounded(std::size_t d) {
    const double inf = std::numeric_limits<double>::infinity();
    return Box{Point(d, -inf), Point(d, inf)};
  }

  bool contains(const Point& x) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    }
    return true;
  }

  Point clamp(Point x) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < lo[i]) x[i] = lo[i];
      if (x[i] > hi[i]) x[i] = hi[i];
    }
    return x;
  }

  /// Euclidean diagonal of the box; infinity when any side is unbounded.
  double diagonal() const {
    double s = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      const double w = hi[i] - lo[i];
      if (!std::isfinite(w)) return std::numeric_limits<double>::infinity();
      s += w * w;
    }
    return std::sqrt(s);
  }
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ v);
}
}  // namespace detail

/// Key derived from the exact bit patterns of the coordinates. Re-visited
/// points therefore map to the same replication streams and sample buffers.
inline std::uint64_t point_key(const Point& x) {
  std::uint64_t h = 0x243f6a8885a308d3ULL ^ static_cast<std::uint64_t>(x.size());
  for (double v : x) h = detail::hash_combine(h, std::bit_cast<std::uint64_t>(v));
  return h;
}

/// Bit-exact equality/hash functors so points can key hash maps.
struct PointBitsEqual {
  bool operator()(const Point& a, const Point& b) const {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
    }
    return true;
  }
};

struct PointBitsHash {
  std::size_t operator()(const Point& x) const { return static_cast<std::size_t>(point_key(x)); }
};

}  // namespace mfopt
