#include "lhv/eval.hpp"

#include <cmath>
#include <stdexcept>

#include "lhv/fastmath.hpp"

namespace lhv {

namespace {

// Per-site features with outcomes folded in: a down outcome evaluates the
// basis at the negated direction. Oddness makes the negation exact.
std::vector<double> signed_features(const ShBasis& basis, const double* dirs,
                                    const std::vector<int>& outcomes) {
  const int n = static_cast<int>(outcomes.size());
  std::vector<double> feat(static_cast<size_t>(n) * basis.dim());
  for (int j = 0; j < n; ++j) {
    if (outcomes[j] != 1 && outcomes[j] != -1)
      throw std::invalid_argument("outcomes must be +1 or -1");
    const double s = static_cast<double>(outcomes[j]);
    const double* d = dirs + static_cast<size_t>(j) * 3;
    basis.eval(s * d[0], s * d[1], s * d[2],
               feat.data() + static_cast<size_t>(j) * basis.dim());
  }
  return feat;
}

double mean_product(const HiddenStateCloud& cloud, const ShBasis& basis,
                    const std::vector<int>& spins_used,
                    const std::vector<double>& feat, Rule rule) {
  const int dim = basis.dim();
  const uint64_t n_h = cloud.samples;
  std::vector<double> prod(n_h);
  for (uint64_t s = 0; s < n_h; ++s) {
    double p = 1.0;
    for (size_t i = 0; i < spins_used.size(); ++i) {
      double z = 0.0;
      const double* f = feat.data() + i * static_cast<size_t>(dim);
      for (int k = 0; k < dim; ++k)
        z += cloud.value(s, spins_used[i], k) * f[k];
      p *= rule == Rule::Soft ? soft_sigma(z) : hard_sigma(z);
    }
    prod[s] = p;
  }
  return tree_sum(prod.data(), prod.size()) / static_cast<double>(n_h);
}

}  // namespace

double lhv_prob_all_up(const HiddenStateCloud& cloud, const ShBasis& basis,
                       const double* dirs, Rule rule) {
  std::vector<int> outcomes(static_cast<size_t>(cloud.spins), 1);
  return lhv_outcome_prob(cloud, basis, dirs, outcomes, rule);
}

double lhv_outcome_prob(const HiddenStateCloud& cloud, const ShBasis& basis,
                        const double* dirs, const std::vector<int>& outcomes,
                        Rule rule) {
  if (basis.dim() != cloud.dim)
    throw std::invalid_argument("lhv_outcome_prob: basis dimension mismatch");
  if (static_cast<int>(outcomes.size()) != cloud.spins)
    throw std::invalid_argument("lhv_outcome_prob: outcome count mismatch");
  std::vector<int> sites(outcomes.size());
  for (size_t j = 0; j < sites.size(); ++j) sites[j] = static_cast<int>(j);
  auto feat = signed_features(basis, dirs, outcomes);
  return mean_product(cloud, basis, sites, feat, rule);
}

double lhv_marginal_prob(const HiddenStateCloud& cloud, const ShBasis& basis,
                         const std::vector<int>& sites, const double* dirs,
                         const std::vector<int>& outcomes, Rule rule) {
  if (basis.dim() != cloud.dim)
    throw std::invalid_argument("lhv_marginal_prob: basis dimension mismatch");
  if (sites.size() != outcomes.size())
    throw std::invalid_argument("lhv_marginal_prob: sites/outcomes mismatch");
  for (int site : sites)
    if (site < 0 || site >= cloud.spins)
      throw std::invalid_argument("lhv_marginal_prob: site out of range");
  if (sites.empty()) return 1.0;
  auto feat = signed_features(basis, dirs, outcomes);
  return mean_product(cloud, basis, sites, feat, rule);
}

}  // namespace lhv
