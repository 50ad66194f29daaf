#pragma once

#include <optional>
#include <vector>

#include "mfopt/errors.hpp"
#include "mfopt/point.hpp"

namespace mfopt {

/// Interpolation design: the center plus two offsets along each coordinate
/// (2d+1 points). Offsets are +-delta when feasible; near a box face both
/// offsets move to the interior side at delta and delta/2, which keeps the
/// set poised for a diagonal quadratic.
struct DesignSet {
  Point center;
  double radius = 0.0;
  std::vector<Point> points;  // points[0] is the center
  // offsets[i] = {s1, s2}: the two displacements used along coordinate i.
  std::vector<std::pair<double, double>> offsets;

  int dimension() const { return static_cast<int>(center.size()); }
};

DesignSet design_set(const Point& center, double delta, const std::optional<Box>& bounds);

/// Quadratic with diagonal curvature interpolating 2d+1 function estimates:
/// m(x) = value + g.(x-c) + 0.5 sum_i h_i (x_i - c_i)^2.
struct LocalModel {
  Point center;
  double value = 0.0;
  std::vector<double> gradient;
  std::vector<double> hessian_diag;

  double evaluate(const Point& x) const {
    double v = value;
    for (std::size_t i = 0; i < center.size(); ++i) {
      const double s = x[i] - center[i];
      v += gradient[i] * s + 0.5 * hessian_diag[i] * s * s;
    }
    return v;
  }

  double gradient_norm() const { return norm2(gradient); }
};

/// Exact interpolant of the estimates on the design set (one per design
/// point, in the design's point order).
LocalModel fit_model(const DesignSet& design, const std::vector<double>& estimates);

/// Approximate minimizer of the model within the Euclidean ball of the given
/// radius around the center: the Cauchy point along -gradient, then a
/// monotone coordinate-wise refinement. Returns the center when the gradient
/// is zero.
Point minimize_model(const LocalModel& model, double delta);

}  // namespace mfopt
