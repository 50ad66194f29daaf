#include "mfopt/rosenbrock.hpp"

namespace mfopt {

double RosenbrockMF::deterministic_value(const Point& x, FidelityLevel level) const {
  const int d = p_.d;
  double sum_x = 0.0;
  for (double v : x) sum_x += v;

  auto f0 = [&]() {
    double s = 0.0;
    for (int i = 0; i + 1 < d; ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      const double b = 1.0 - x[i];
      s += 10.0 * a * a + b * b;
    }
    return s;
  };

  switch (level) {
    case 0:
      return f0();
    case 1: {
      double s = 0.0;
      for (int i = 0; i + 1 < d; ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = -2.0 - x[i];
        s += 5.0 * a * a + b * b;
      }
      return s - 0.5 * sum_x;
    }
    case 2: {
      const double divisor = p_.f2_sum_all_coords ? 10.0 + 0.25 * sum_x
                                                  : 10.0 + 0.25 * d * x[0];
      return (f0() - 4.0 - 0.5 * sum_x) / divisor;
    }
    default:
      throw InvalidLevel("rosenbrock_mf: bad fidelity level");
  }
}

double RosenbrockMF::noise(const Replication& rep, FidelityLevel level) const {
  if (p_.noise_scale == 0.0) return 0.0;
  const int d = p_.d;
  const double sd = p_.noise_scale / std::sqrt(static_cast<double>(d));

  ReplicationStream shared = rep.shared();
  double sum0 = 0.0;
  for (int i = 0; i < d; ++i) sum0 += shared.normal(0.0, sd);
  if (level == 0) return sum0;

  ReplicationStream priv = rep.level_private(level);
  double sum_t = 0.0;
  for (int i = 0; i < d; ++i) sum_t += priv.normal(0.0, sd);
  return 0.5 * (sum0 + sum_t);
}

}  // namespace mfopt
