#pragma once
// Serial long-double twin of StepKernel. Slow and allocation-heavy by
// design: it is the oracle the parallel kernels are tested against and the
// baseline the benchmark compares with.

#include <vector>

#include "lhv/cloud.hpp"
#include "lhv/sh_basis.hpp"

namespace lhv::ref {

struct StepResult {
  std::vector<double> p;     // per batch element
  double loss = 0.0;
  std::vector<double> grad;  // cloud-shaped
};

// directions layout [batch][spins][3]; pq one quantum probability per batch
// element.
StepResult step(const HiddenStateCloud& cloud, const ShBasis& basis,
                const double* dirs, int batch, const double* pq);

// Single direction tuple [spins][3], soft rule.
double prob_all_up(const HiddenStateCloud& cloud, const ShBasis& basis,
                   const double* dirs);

}  // namespace lhv::ref
