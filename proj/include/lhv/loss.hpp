#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "lhv/cloud.hpp"

namespace lhv {

// Two-outcome KL divergence q*ln(q/p) + (1-q)*ln((1-q)/(1-p)) with both
// probabilities clamped away from {0, 1} and the 0*ln0 limit taken as 0.
// This scalar form is the per-setting term of the training loss. The true
// value is non-negative (Gibbs); the computed one is clamped at zero because
// near p = q it otherwise dips below zero at the rounding scale of T.
template <typename T>
inline T kl_two_outcome(T q, T p) {
  const T lo = static_cast<T>(1e-12);
  T hi;
  if constexpr (sizeof(T) == 4) {
    hi = std::nextafter(static_cast<T>(1), static_cast<T>(0));
  } else {
    hi = static_cast<T>(1) - static_cast<T>(1e-12);
  }
  p = std::min(std::max(p, lo), hi);
  q = std::min(std::max(q, lo), hi);
  const T one = static_cast<T>(1);
  T acc = static_cast<T>(0);
  if (q > static_cast<T>(0)) acc += q * std::log(q / p);
  if (one - q > static_cast<T>(0)) acc += (one - q) * std::log((one - q) / (one - p));
  return acc > static_cast<T>(0) ? acc : static_cast<T>(0);
}

// Single-scalar optimization probe: gradient descent of one probability
// toward a fixed target under the two-outcome KL loss, carried out entirely
// in the requested precision. Near convergence the computed loss sits in the
// rounding regime of that datatype; the reported plateau is the median loss
// over the trailing quarter of steps, then the median across a fixed panel
// of targets. The constant learning rate is chosen large enough that the
// iterate keeps oscillating through several representable values instead of
// freezing on one of them, which is what makes the probe read the datatype's
// granularity rather than one arbitrary rounding residue.
struct ScalarProbeResult {
  double plateau = 0.0;                 // median over targets
  std::vector<double> per_target;       // per-target tail medians
  std::vector<double> targets;
};

ScalarProbeResult scalar_probe(Precision precision);

}  // namespace lhv
