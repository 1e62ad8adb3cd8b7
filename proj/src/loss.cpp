#include "lhv/loss.hpp"

#include <algorithm>

#include "lhv/stats.hpp"

namespace lhv {

namespace {

template <typename T>
double probe_one_target(double target, int64_t steps, double lr_in, double x0) {
  const T q = static_cast<T>(target);
  const T lr = static_cast<T>(lr_in);
  const T one = static_cast<T>(1);
  T x = static_cast<T>(x0);

  const int64_t tail_start = steps - steps / 4;
  std::vector<double> tail;
  tail.reserve(static_cast<size_t>(steps - tail_start));
  for (int64_t t = 0; t < steps; ++t) {
    const T loss = kl_two_outcome<T>(q, x);
    if (t >= tail_start) tail.push_back(std::abs(static_cast<double>(loss)));
    // dL/dx for the two-outcome KL with x as the model probability.
    const T g = (x - q) / (x * (one - x));
    x -= lr * g;
    const T eps = static_cast<T>(1e-6);
    x = std::min(std::max(x, eps), one - eps);
  }
  return median(tail);
}

}  // namespace

ScalarProbeResult scalar_probe(Precision precision) {
  ScalarProbeResult r;
  r.targets = {0.23, 0.3, 0.41, 0.57, 0.68};
  const int64_t steps = 20000;
  const double lr = 0.05;
  for (double q : r.targets) {
    const double x0 = 0.5 * (q + 0.5);  // start between target and 1/2
    const double m = precision == Precision::F32 ? probe_one_target<float>(q, steps, lr, x0)
                                                 : probe_one_target<double>(q, steps, lr, x0);
    r.per_target.push_back(m);
  }
  std::vector<double> copy = r.per_target;
  r.plateau = median(copy);
  return r;
}

}  // namespace lhv
