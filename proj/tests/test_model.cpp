#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "mfopt/local_model.hpp"

using namespace mfopt;

namespace {

std::vector<double> sample_at(const DesignSet& d, const std::function<double(const Point&)>& f) {
  std::vector<double> out;
  for (const Point& p : d.points) out.push_back(f(p));
  return out;
}

}  // namespace

TEST_CASE("design set is the coordinate cross") {
  const DesignSet d = design_set(Point{0.0, 0.0}, 1.0, std::nullopt);
  REQUIRE(d.points.size() == 5);
  CHECK(d.points[0] == Point{0.0, 0.0});
  CHECK(d.points[1] == Point{1.0, 0.0});
  CHECK(d.points[2] == Point{-1.0, 0.0});
  CHECK(d.points[3] == Point{0.0, 1.0});
  CHECK(d.points[4] == Point{0.0, -1.0});

  CHECK(design_set(Point{0.0}, 1.0, std::nullopt).points.size() == 3);
  CHECK_THROWS_AS(design_set(Point{0.0}, 0.0, std::nullopt), DegenerateRadius);
}

TEST_CASE("design set reflects into the box") {
  const Box box{Point{-1.0, -1.0}, Point{1.0, 1.0}};
  // center at a corner: every offset must stay feasible
  const DesignSet d = design_set(Point{1.0, -1.0}, 0.5, box);
  for (const Point& p : d.points) CHECK(box.contains(p));
  // first coordinate hits the upper face: both offsets on the minus side
  CHECK(d.offsets[0].first == doctest::Approx(-0.5));
  CHECK(d.offsets[0].second == doctest::Approx(-0.25));
  CHECK(d.offsets[1].first == doctest::Approx(0.5));
  CHECK(d.offsets[1].second == doctest::Approx(0.25));

  // radius wider than the box: fall back to the roomier side
  const DesignSet wide = design_set(Point{0.5, 0.0}, 5.0, box);
  for (const Point& p : wide.points) CHECK(box.contains(p));
}

TEST_CASE("fit is exact on constants and quadratics") {
  const DesignSet d1 = design_set(Point{0.0}, 1.0, std::nullopt);
  const LocalModel constant = fit_model(d1, {3.0, 3.0, 3.0});
  CHECK(constant.gradient[0] == doctest::Approx(0.0));
  CHECK(constant.hessian_diag[0] == doctest::Approx(0.0));

  const LocalModel square = fit_model(d1, sample_at(d1, [](const Point& p) {
                                        return p[0] * p[0];
                                      }));
  CHECK(square.gradient[0] == doctest::Approx(0.0));
  CHECK(square.hessian_diag[0] == doctest::Approx(2.0));
  CHECK(square.evaluate(Point{0.7}) == doctest::Approx(0.49));
}

TEST_CASE("fit interpolates every design point") {
  auto f = [](const Point& p) {
    return std::exp(0.3 * p[0]) + std::sin(p[1]) - 2.0 * p[0] * p[0];
  };
  const Box box{Point{-2.0, -2.0}, Point{2.0, 2.0}};
  for (double delta : {0.5, 0.1}) {
    const DesignSet d = design_set(Point{1.8, -0.3}, delta, box);  // reflected along x
    const auto estimates = sample_at(d, f);
    const LocalModel m = fit_model(d, estimates);
    for (std::size_t i = 0; i < d.points.size(); ++i) {
      const double denom = std::max(1.0, std::abs(estimates[i]));
      CHECK(std::abs(m.evaluate(d.points[i]) - estimates[i]) / denom < 1e-10);
    }
  }
  CHECK_THROWS_AS(fit_model(design_set(Point{0.0}, 1.0, std::nullopt), {1.0, 2.0}), NonFinite);
  CHECK_THROWS_AS(
      fit_model(design_set(Point{0.0}, 1.0, std::nullopt), {1.0, 2.0, std::nan("")}), NonFinite);
}

TEST_CASE("gradient error shrinks like delta squared") {
  auto f = [](const Point& p) { return std::exp(0.5 * p[0]) * std::cos(p[1]); };
  const Point center{0.4, -0.2};
  const double gx = 0.5 * std::exp(0.5 * center[0]) * std::cos(center[1]);
  const double gy = -std::exp(0.5 * center[0]) * std::sin(center[1]);

  auto gradient_error = [&](double delta) {
    const DesignSet d = design_set(center, delta, std::nullopt);
    const LocalModel m = fit_model(d, sample_at(d, f));
    const double ex = m.gradient[0] - gx;
    const double ey = m.gradient[1] - gy;
    return std::sqrt(ex * ex + ey * ey);
  };

  double previous = gradient_error(0.4);
  for (double delta : {0.2, 0.1, 0.05}) {
    const double current = gradient_error(delta);
    CHECK(previous / current >= 3.5);
    previous = current;
  }
}

TEST_CASE("gradient norm") {
  LocalModel m;
  m.center = {0.0, 0.0};
  m.value = 0.0;
  m.gradient = {3.0, 4.0};
  m.hessian_diag = {0.0, 0.0};
  CHECK(m.gradient_norm() == doctest::Approx(5.0));

  // quadratic x^2 sampled exactly at center 1: gradient is exact
  const DesignSet d = design_set(Point{1.0}, 0.5, std::nullopt);
  const LocalModel q = fit_model(d, sample_at(d, [](const Point& p) { return p[0] * p[0]; }));
  CHECK(q.gradient_norm() == doctest::Approx(2.0));
}

TEST_CASE("model minimization") {
  SUBCASE("linear model steps to the boundary") {
    LocalModel m;
    m.center = {0.0, 0.0};
    m.gradient = {1.0, 0.0};
    m.hessian_diag = {0.0, 0.0};
    const Point p = minimize_model(m, 1.0);
    CHECK(p[0] == doctest::Approx(-1.0));
    CHECK(p[1] == doctest::Approx(0.0));
  }

  SUBCASE("quadratic line search finds the interior minimum") {
    const DesignSet d = design_set(Point{1.0}, 0.5, std::nullopt);
    const LocalModel m = fit_model(d, {1.0, 2.25, 0.25});  // x^2 sampled exactly
    const Point p = minimize_model(m, 10.0);
    CHECK(p[0] == doctest::Approx(0.0));
  }

  SUBCASE("zero gradient returns the center") {
    LocalModel m;
    m.center = {0.3, -0.7};
    m.gradient = {0.0, 0.0};
    m.hessian_diag = {1.0, 1.0};
    CHECK(minimize_model(m, 1.0) == m.center);
  }

  SUBCASE("never increases the model and never leaves the ball") {
    auto s = [](int i) { return 0.1 * i; };
    for (int trial = 0; trial < 50; ++trial) {
      LocalModel m;
      m.center = {s(trial % 7), -s(trial % 5)};
      m.gradient = {std::sin(1.0 + trial), std::cos(2.0 + trial)};
      m.hessian_diag = {std::sin(3.0 * trial) * 4.0, std::cos(5.0 * trial) * 4.0};
      m.value = 1.0;
      const double delta = 0.1 + 0.05 * (trial % 9);
      const Point p = minimize_model(m, delta);
      CHECK(m.evaluate(p) <= m.value + 1e-12);
      CHECK(distance(p, m.center) <= delta + 1e-12);
    }
  }
}
