#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mfopt/mfas.hpp"
#include "support/allocation_oracle.hpp"
#include "support/synthetic.hpp"

using namespace mfopt;

namespace {

Moments fixture_moments(double var0, double var1, double cov) {
  Moments m;
  m.target_level = 0;
  m.mean = {0.0, 0.0};
  m.variance = {var0, var1};
  m.covariance = {var0, cov};
  m.n_used = {2, 2};
  return m;
}

SamplingTarget target_with(double delta, double lambda, double kappa = 1.0,
                           double sigma_lb = 1e-3) {
  SamplingTarget t;
  t.point = {0.0};
  t.target_level = 0;
  t.delta = delta;
  t.lambda_k = lambda;
  t.kappa = kappa;
  t.sigma_lb = sigma_lb;
  return t;
}

}  // namespace

TEST_CASE("mc_required_size") {
  CHECK(mc_required_size(2.0, target_with(1.0, 4.0, 1.0, 0.1)) == 16);
  CHECK(mc_required_size(0.0, target_with(1.0, 1.0, 1.0, 0.1)) == 1);  // floor engages

  // doubling delta shrinks the requirement by 16x (exact at these values)
  const std::int64_t n_small = mc_required_size(2.0, target_with(2.0, 4.0));
  const std::int64_t n_large = mc_required_size(2.0, target_with(1.0, 4.0));
  CHECK(n_small == 1);
  CHECK(n_large == 16 * n_small);
}

TEST_CASE("next_fidelity_to_query picks the highest deficient level") {
  using V = std::vector<std::int64_t>;
  CHECK(next_fidelity_to_query(V{3, 3, 3}, V{10, 20, 40}) == 0);
  CHECK(next_fidelity_to_query(V{10, 3, 3}, V{10, 20, 40}) == 1);
  CHECK_FALSE(next_fidelity_to_query(V{10, 20, 40}, V{10, 20, 40}).has_value());
  // within one of the allocation counts as satisfied
  CHECK_FALSE(next_fidelity_to_query(V{9, 19, 39}, V{10, 20, 40}).has_value());
}

TEST_CASE("allocation: single level degenerates to plain MC") {
  Moments m;
  m.target_level = 0;
  m.mean = {0.0};
  m.variance = {4.0};
  m.covariance = {4.0};
  m.n_used = {3};
  const SamplingTarget t = target_with(1.0, 4.0, 1.0, 0.1);
  const std::vector<double> costs{1.0};
  const std::vector<std::int64_t> current{3};
  const AllocationResult r = solve_allocation(m, costs, t, current);
  CHECK(r.chosen_method == SamplingMethod::MC);
  CHECK(r.mc_size == 16);
  CHECK(r.n_star[0] == 16);
}

TEST_CASE("allocation: zero correlation turns the control variate off") {
  const Moments m = fixture_moments(1.0, 1.0, 0.0);
  const SamplingTarget t = target_with(0.5, 2.0);
  const std::vector<double> costs{1.0, 0.1};
  const std::vector<std::int64_t> current{3, 3};
  const AllocationResult r = solve_allocation(m, costs, t, current);
  CHECK(r.c_star[0] == 0.0);
  CHECK(r.predicted_mfmc_cost >= r.predicted_mc_cost);
  CHECK(r.chosen_method == SamplingMethod::MC);
}

TEST_CASE("allocation matches the brute-force grid optimum within 5%") {
  struct Fixture {
    double var0, var1, rho, w1, delta, lambda;
  };
  std::vector<Fixture> fixtures;
  for (double rho : {0.0, 0.3, 0.6, 0.9, 0.99})
    for (double w1 : {0.02, 0.1, 0.3, 0.5}) fixtures.push_back({1.0, 1.0, rho, w1, 0.45, 2.0});
  fixtures.push_back({4.0, 2.0, 0.8, 0.1, 0.6, 3.0});
  fixtures.push_back({0.5, 3.0, 0.7, 0.25, 0.4, 2.0});
  fixtures.push_back({2.0, 0.5, 0.95, 0.05, 0.5, 5.0});
  fixtures.push_back({1.0, 1.0, -0.6, 0.1, 0.45, 2.0});  // negative correlation still helps

  for (const Fixture& f : fixtures) {
    CAPTURE(f.rho);
    CAPTURE(f.w1);
    const double cov = f.rho * std::sqrt(f.var0 * f.var1);
    const Moments m = fixture_moments(f.var0, f.var1, cov);
    const SamplingTarget t = target_with(f.delta, f.lambda);
    const double V = t.target_variance();

    const auto brute = testing::brute_force_allocation(f.var0, f.var1, cov, 1.0, f.w1, V);
    REQUIRE(brute.feasible);

    const std::vector<double> costs{1.0, f.w1};
    const std::vector<std::int64_t> current{2, 2};
    const AllocationResult r = solve_allocation(m, costs, t, current);

    // every returned solution satisfies the constraint system
    REQUIRE(r.n_star.size() == 2);
    CHECK(r.n_star[0] >= 2);
    CHECK(r.n_star[0] <= r.n_star[1]);
    CHECK(mfmc_variance(m, r.n_star, r.c_star) <= V * (1.0 + 1e-9));

    const double cost = 1.0 * static_cast<double>(r.n_star[0]) +
                        f.w1 * static_cast<double>(r.n_star[1]);
    CHECK(cost <= 1.05 * brute.cost);
  }
}

TEST_CASE("mfas: noiseless problem returns after the initial fill") {
  auto problem = std::make_shared<testing::QuadraticAllLevels>(1, 2,
                                                               std::vector<double>{1.0, 0.5});
  SolverConfig cfg;
  SampleCache cache(problem->num_levels());
  BudgetLedger ledger(1000.0, problem->costs());
  MfasEngine engine(*problem, cfg, 123, cache, ledger);

  SamplingTarget t = target_with(1.0, 2.0);
  t.point = {0.5};
  const MfasOutput out = engine.estimate(t);
  CHECK(out.method_used == SamplingMethod::MC);
  CHECK_FALSE(out.budget_exhausted);
  CHECK(out.sizes == std::vector<std::int64_t>{3, 3});
  CHECK(out.estimate == doctest::Approx(0.25));
  CHECK(out.estimated_variance <= t.target_variance());
  CHECK(ledger.spent() == doctest::Approx(3.0 * 1.0 + 3.0 * 0.5));
}

TEST_CASE("mfas: exit guarantee and determinism on a noisy fixture") {
  auto problem = testing::GaussianLevels::two_level(0.9, 0.2, 1.5, 1.2);
  SolverConfig cfg;

  for (double delta : {1.0, 0.3, 0.1}) {
    SampleCache cache(problem->num_levels());
    BudgetLedger ledger(1e9, problem->costs());
    MfasEngine engine(*problem, cfg, 7, cache, ledger);
    SamplingTarget t = target_with(delta, 4.0);
    t.point = {1.0};
    const MfasOutput out = engine.estimate(t);
    CHECK_FALSE(out.budget_exhausted);
    CHECK(out.estimated_variance <= t.target_variance());

    // replaying with a fresh cache reproduces everything bit-exactly
    SampleCache cache2(problem->num_levels());
    BudgetLedger ledger2(1e9, problem->costs());
    MfasEngine engine2(*problem, cfg, 7, cache2, ledger2);
    const MfasOutput out2 = engine2.estimate(t);
    CHECK(out2.estimate == out.estimate);
    CHECK(out2.sizes == out.sizes);
    CHECK(ledger2.spent() == ledger.spent());
  }
}

TEST_CASE("mfas: cheap correlated low fidelity beats plain MC") {
  const double rho = 0.99;
  auto problem = testing::GaussianLevels::two_level(rho, 0.1);
  SolverConfig cfg;
  SamplingTarget t = target_with(0.3, 4.0);

  const double true_sigma0 = std::sqrt(problem->true_variance(0));
  const double analytic_mc_cost =
      1.0 * static_cast<double>(mc_required_size(true_sigma0, t));

  int good = 0;
  for (int run = 0; run < 100; ++run) {
    SampleCache cache(problem->num_levels());
    BudgetLedger ledger(1e9, problem->costs());
    MfasEngine engine(*problem, cfg, 1000 + static_cast<std::uint64_t>(run), cache, ledger);
    t.point = {static_cast<double>(run)};
    const MfasOutput out = engine.estimate(t);
    CHECK(out.estimated_variance <= t.target_variance());
    if (out.method_used == SamplingMethod::MFMC && ledger.spent() < 1.05 * analytic_mc_cost)
      ++good;
  }
  CHECK(good >= 90);
}

TEST_CASE("mfas: target level q uses plain MC on that level only") {
  auto problem = testing::GaussianLevels::two_level(0.9, 0.1);
  SolverConfig cfg;
  SampleCache cache(problem->num_levels());
  BudgetLedger ledger(1e9, problem->costs());
  MfasEngine engine(*problem, cfg, 3, cache, ledger);

  SamplingTarget t = target_with(0.5, 2.0);
  t.target_level = 1;
  t.point = {2.0};
  const MfasOutput out = engine.estimate(t);
  CHECK(out.method_used == SamplingMethod::MC);
  CHECK_FALSE(out.budget_exhausted);
  CHECK(ledger.queries(0) == 0);  // level 0 never touched
  CHECK(ledger.queries(1) >= 3);
}

TEST_CASE("mfas: budget exhaustion returns a flagged best-effort estimate") {
  auto problem = testing::GaussianLevels::two_level(0.5, 0.1);
  SolverConfig cfg;
  SampleCache cache(problem->num_levels());
  BudgetLedger ledger(2.0, problem->costs());
  MfasEngine engine(*problem, cfg, 5, cache, ledger);

  SamplingTarget t = target_with(0.05, 50.0);  // unreachable precision
  t.point = {0.0};
  const MfasOutput out = engine.estimate(t);
  CHECK(out.budget_exhausted);
  CHECK(std::isfinite(out.estimate));
  // overshoot is bounded by one batch
  CHECK(ledger.spent() <= 2.0 + ledger.max_single_charge());
}

TEST_CASE("mfas: cache reuse makes the second call free") {
  auto problem = testing::GaussianLevels::two_level(0.9, 0.1);
  SolverConfig cfg;
  SampleCache cache(problem->num_levels());
  BudgetLedger ledger(1e9, problem->costs());
  MfasEngine engine(*problem, cfg, 9, cache, ledger);

  SamplingTarget t = target_with(0.4, 3.0);
  t.point = {1.5};
  const MfasOutput first = engine.estimate(t);
  const double spent_after_first = ledger.spent();
  const MfasOutput second = engine.estimate(t);
  CHECK(second.estimate == first.estimate);
  CHECK(ledger.spent() == spent_after_first);
  CHECK(second.budget_charged == 0.0);
}

TEST_CASE("mfas: per-level sizes never shrink across loop iterations") {
  auto problem = testing::GaussianLevels::two_level(0.8, 0.2);
  SolverConfig cfg;
  SampleCache cache(problem->num_levels());
  BudgetLedger ledger(1e9, problem->costs());
  MfasEngine engine(*problem, cfg, 77, cache, ledger);
  std::vector<MfasEngine::TraceRow> trace;
  engine.set_trace(&trace);

  SamplingTarget t = target_with(0.2, 6.0);
  t.point = {0.0};
  engine.estimate(t);
  REQUIRE(trace.size() >= 2);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    CHECK(trace[i].target_variance == trace.front().target_variance);
    for (std::size_t r = 0; r < trace[i].sizes.size(); ++r)
      CHECK(trace[i].sizes[r] >= trace[i - 1].sizes[r]);
  }
}
