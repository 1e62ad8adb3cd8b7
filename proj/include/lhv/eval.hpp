#pragma once
// Double-precision LHV probability evaluators for arbitrary outcomes and
// marginals. These are the measurement-side API; training uses the batched
// StepKernel instead.

#include <vector>

#include "lhv/cloud.hpp"
#include "lhv/sh_basis.hpp"

namespace lhv {

enum class Rule { Soft, Hard };

// P(all spins up | directions); directions flat [spins][3].
double lhv_prob_all_up(const HiddenStateCloud& cloud, const ShBasis& basis,
                       const double* dirs, Rule rule = Rule::Soft);

// P(outcomes | directions); outcomes[j] is +1 (up) or -1 (down). A down
// outcome is evaluated as "up along the negated direction", which is the
// response-rule symmetry made literal, so flipping an outcome while negating
// its direction is bitwise invariant.
double lhv_outcome_prob(const HiddenStateCloud& cloud, const ShBasis& basis,
                        const double* dirs, const std::vector<int>& outcomes,
                        Rule rule = Rule::Soft);

// Only `sites` are measured; unmeasured spins contribute a factor of one.
// dirs/outcomes are indexed by position in `sites` (flat [sites.size()][3]).
double lhv_marginal_prob(const HiddenStateCloud& cloud, const ShBasis& basis,
                         const std::vector<int>& sites, const double* dirs,
                         const std::vector<int>& outcomes,
                         Rule rule = Rule::Soft);

}  // namespace lhv
