#include "mfopt/local_model.hpp"

#include <algorithm>
#include <cmath>

namespace mfopt {

DesignSet design_set(const Point& center, double delta, const std::optional<Box>& bounds) {
  const double floor = 1e-12 * std::max(1.0, norm2(center));
  if (!(delta > floor)) throw DegenerateRadius("design_set: radius below machine-scaled floor");
  if (!all_finite(center)) throw NonFinite("design_set: center has non-finite entries");

  DesignSet d;
  d.center = center;
  d.radius = delta;
  d.points.push_back(center);
  const std::size_t dim = center.size();
  d.offsets.resize(dim);

  for (std::size_t i = 0; i < dim; ++i) {
    double room_hi = std::numeric_limits<double>::infinity();
    double room_lo = std::numeric_limits<double>::infinity();
    if (bounds) {
      room_hi = bounds->hi[i] - center[i];
      room_lo = center[i] - bounds->lo[i];
    }
    double s1, s2;
    if (delta <= room_hi && delta <= room_lo) {
      s1 = delta;
      s2 = -delta;
    } else if (delta <= room_hi) {
      s1 = delta;
      s2 = delta / 2.0;  // reflected to the feasible side
    } else if (delta <= room_lo) {
      s1 = -delta;
      s2 = -delta / 2.0;
    } else {
      // Both full offsets infeasible: use the roomier side at its full width.
      const double width = std::max(room_hi, room_lo);
      if (!(width > floor))
        throw DegenerateRadius("design_set: no room inside bounds along a coordinate");
      const double sign = room_hi >= room_lo ? 1.0 : -1.0;
      s1 = sign * width;
      s2 = sign * width / 2.0;
    }
    d.offsets[i] = {s1, s2};
    Point p1 = center;
    p1[i] += s1;
    Point p2 = center;
    p2[i] += s2;
    d.points.push_back(std::move(p1));
    d.points.push_back(std::move(p2));
  }
  return d;
}

LocalModel fit_model(const DesignSet& design, const std::vector<double>& estimates) {
  const std::size_t dim = design.center.size();
  if (estimates.size() != 2 * dim + 1)
    throw NonFinite("fit_model: need one estimate per design point");
  for (double v : estimates)
    if (!std::isfinite(v)) throw NonFinite("fit_model: non-finite estimate");

  LocalModel m;
  m.center = design.center;
  m.value = estimates[0];
  m.gradient.resize(dim);
  m.hessian_diag.resize(dim);

  for (std::size_t i = 0; i < dim; ++i) {
    const auto [s1, s2] = design.offsets[i];
    const double y1 = estimates[1 + 2 * i] - m.value;
    const double y2 = estimates[2 + 2 * i] - m.value;
    // Solve g*s + h*s^2/2 = y for both offsets.
    const double det = s1 * s2 * (s2 - s1) / 2.0;
    m.gradient[i] = (y1 * s2 * s2 / 2.0 - y2 * s1 * s1 / 2.0) / det;
    m.hessian_diag[i] = (y2 * s1 - y1 * s2) / det;
  }
  return m;
}

namespace {

// Largest feasible |step| along coordinate i given the other offsets.
double residual_radius(const std::vector<double>& s, std::size_t skip, double delta) {
  double used = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j)
    if (j != skip) used += s[j] * s[j];
  const double rem = delta * delta - used;
  return rem > 0.0 ? std::sqrt(rem) : 0.0;
}

}  // namespace

Point minimize_model(const LocalModel& model, double delta) {
  const std::size_t dim = model.center.size();
  const double gnorm = model.gradient_norm();
  if (gnorm == 0.0) return model.center;

  // Cauchy point: exact minimizer along -g within the ball.
  double curvature = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double u = model.gradient[i] / gnorm;
    curvature += model.hessian_diag[i] * u * u;
  }
  double tau = delta;
  if (curvature > 0.0) tau = std::min(delta, gnorm / curvature);

  std::vector<double> step(dim);
  for (std::size_t i = 0; i < dim; ++i) step[i] = -tau * model.gradient[i] / gnorm;

  // Coordinate-wise refinement: never increases the model value, never
  // leaves the ball.
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double r = residual_radius(step, i, delta);
      const double g = model.gradient[i];
      const double h = model.hessian_diag[i];
      auto value_at = [&](double s) { return g * s + 0.5 * h * s * s; };
      double best = step[i];
      double best_val = value_at(best);
      auto consider = [&](double s) {
        const double v = value_at(s);
        if (v < best_val) {
          best = s;
          best_val = v;
        }
      };
      consider(-r);
      consider(r);
      if (h > 0.0) consider(std::clamp(-g / h, -r, r));
      step[i] = best;
    }
  }

  Point out = model.center;
  for (std::size_t i = 0; i < dim; ++i) out[i] += step[i];

  // Guard against accumulated rounding pushing the step just outside.
  double len = 0.0;
  for (double s : step) len += s * s;
  len = std::sqrt(len);
  if (len > delta) {
    const double shrink = delta / len;
    for (std::size_t i = 0; i < dim; ++i) out[i] = model.center[i] + step[i] * shrink;
  }
  return out;
}

}  // namespace mfopt
