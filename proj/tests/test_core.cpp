#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfopt/budget.hpp"
#include "mfopt/config.hpp"
#include "mfopt/point.hpp"
#include "mfopt/rng.hpp"

using namespace mfopt;

TEST_CASE("streams replay bit-identically") {
  const Point x{0.25, -1.5};
  auto s1 = make_stream(42, x, 1, SubstreamTag::shared());
  auto s2 = make_stream(42, x, 1, SubstreamTag::shared());
  for (int i = 0; i < 100; ++i) CHECK(s1.next_u64() == s2.next_u64());
}

TEST_CASE("shared substream is identical regardless of consuming level") {
  const Point x{0.5};
  Replication rep = make_replication(7, x, 1);
  // A level-0 consumer and a level-1 consumer of the shared substream see
  // the same draws.
  auto a = rep.shared();
  auto b = rep.shared();
  for (int i = 0; i < 50; ++i) CHECK(a.uniform() == b.uniform());
  // Private substreams differ from the shared one and from each other.
  auto p1 = rep.level_private(1);
  auto p2 = rep.level_private(2);
  auto sh = rep.shared();
  CHECK(p1.next_u64() != p2.next_u64());
  CHECK(rep.level_private(1).next_u64() != sh.next_u64());
}

TEST_CASE("distinct replications are empirically uncorrelated") {
  const Point x{1.0, 2.0};
  const int n = 10000;
  std::vector<double> u1(n), u2(n);
  auto s1 = make_stream(123, x, 1, SubstreamTag::shared());
  auto s2 = make_stream(123, x, 2, SubstreamTag::shared());
  for (int j = 0; j < n; ++j) {
    u1[j] = s1.uniform();
    u2[j] = s2.uniform();
  }
  double m1 = 0, m2 = 0;
  for (int j = 0; j < n; ++j) {
    m1 += u1[j];
    m2 += u2[j];
  }
  m1 /= n;
  m2 /= n;
  double cov = 0, v1 = 0, v2 = 0;
  for (int j = 0; j < n; ++j) {
    cov += (u1[j] - m1) * (u2[j] - m2);
    v1 += (u1[j] - m1) * (u1[j] - m1);
    v2 += (u2[j] - m2) * (u2[j] - m2);
  }
  const double rho = cov / std::sqrt(v1 * v2);
  CHECK(std::abs(rho) < 0.05);
}

TEST_CASE("post-evaluation scope yields streams disjoint from optimization") {
  const Point x{0.0};
  auto opt = make_stream(9, x, 1, SubstreamTag::shared(), StreamScope::optimization);
  auto post = make_stream(9, x, 1, SubstreamTag::shared(), StreamScope::post_evaluation);
  CHECK(opt.next_u64() != post.next_u64());
  CHECK(opt.scope() == StreamScope::optimization);
  CHECK(post.scope() == StreamScope::post_evaluation);
}

TEST_CASE("stream distributions have the right moments") {
  auto s = make_stream(1000, Point{0.0}, 1, SubstreamTag::shared());
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    sum += z;
    sumsq += z * z;
  }
  CHECK(std::abs(sum / n) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.02));

  CHECK(ReplicationStream::inverse_normal_cdf(0.975) == doctest::Approx(1.959964).epsilon(1e-4));
  CHECK(ReplicationStream::inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-9));

  double esum = 0.0;
  for (int i = 0; i < 20000; ++i) esum += s.exponential(2.5);
  CHECK(esum / 20000 == doctest::Approx(2.5).epsilon(0.05));
  CHECK(s.exponential(0.0) == 0.0);

  double psum = 0.0;
  for (int i = 0; i < 20000; ++i) psum += static_cast<double>(s.poisson(3.0));
  CHECK(psum / 20000 == doctest::Approx(3.0).epsilon(0.05));
  CHECK(s.poisson(0.0) == 0);
}

TEST_CASE("point keys depend on exact bit patterns") {
  CHECK(point_key(Point{1.0, 2.0}) == point_key(Point{1.0, 2.0}));
  CHECK(point_key(Point{1.0, 2.0}) != point_key(Point{2.0, 1.0}));
  CHECK(point_key(Point{0.1}) != point_key(Point{0.1000000001}));
  CHECK(point_key(Point{1.0}) != point_key(Point{1.0, 0.0}));
}

TEST_CASE("ledger charges are cost-weighted exactly") {
  BudgetLedger ledger(100.0, CostVector({1.0, 0.3, 0.1}));
  ledger.charge(0, 10);
  ledger.charge(1, 20);
  CHECK(ledger.spent() == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(ledger.queries(0) == 10);
  CHECK(ledger.queries(1) == 20);

  const double before = ledger.spent();
  ledger.charge(2, 0);
  CHECK(ledger.spent() == before);

  BudgetLedger inv(100.0, CostVector({1.0, 0.5, 0.3}));
  inv.charge(2, 100);
  CHECK(inv.spent() == doctest::Approx(30.0).epsilon(1e-12));
}

TEST_CASE("ledger spent is nondecreasing and matches the counters") {
  BudgetLedger ledger(10.0, CostVector({1.0, 0.3}));
  auto s = make_stream(5, Point{0.0}, 1, SubstreamTag::shared());
  double last = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int level = static_cast<int>(s.next_u64() % 2);
    const auto count = static_cast<std::int64_t>(s.next_u64() % 5);
    ledger.charge(level, count);
    CHECK(ledger.spent() >= last);
    last = ledger.spent();
    double manual = 1.0 * static_cast<double>(ledger.queries(0)) +
                    0.3 * static_cast<double>(ledger.queries(1));
    CHECK(ledger.spent() == manual);
  }
  CHECK(ledger.exhausted());  // 200 draws far exceed the limit of 10
  CHECK(ledger.overshoot() >= 0.0);
}

TEST_CASE("ledger rejects bad input") {
  BudgetLedger ledger(10.0, CostVector({1.0}));
  CHECK_THROWS_AS(ledger.charge(1, 1), InvalidLevel);
  CHECK_THROWS_AS(ledger.charge(0, -1), ConfigError);
  CHECK_THROWS_AS(CostVector({1.0, 1.2}), ConfigError);
  CHECK_THROWS_AS(CostVector({1.0, 0.0}), ConfigError);
}

TEST_CASE("lambda schedule") {
  SolverConfig cfg;
  cfg.lambda_min = 2.0;
  cfg.lambda_c = 2.0;
  CHECK(lambda_at(cfg, 0) == doctest::Approx(2.0));
  CHECK(lambda_at(cfg, std::exp(5.0) - 2.0) == doctest::Approx(10.0).epsilon(1e-12));
  double last = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double l = lambda_at(cfg, k);
    CHECK(l >= last);
    last = l;
  }
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.gamma1 = 0.9;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.gamma1 = 1.5;
  cfg.eta = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
