#pragma once
// Small numerical utilities: deterministic reductions, quadrature,
// goodness-of-fit statistics, stable hashing.

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace lhv {

// Fixed-order reduction: serial sums over blocks of 64, then a pairwise tree
// over the block partials. The result depends only on the element order,
// never on the worker count.
double block_tree_sum(std::span<const double> x);

double median(std::vector<double> x);  // by value: sorts a copy

// Median of the final `frac` tail of a series (at least one element).
double tail_median(std::span<const double> x, double frac);

struct GaussLegendre {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

// Adaptive Simpson on [a, b]; handles piecewise-smooth integrands.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol, int max_depth = 48);

// Regularized upper incomplete gamma Q(a, x); Q(dof/2, chi2/2) is the
// chi-squared tail probability.
double gamma_q(double a, double x);

// Chi-squared goodness of fit. Bins with expected count below `min_expected`
// are pooled into one bin before the statistic is formed.
struct Chi2Result {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};
Chi2Result chi2_gof(std::span<const double> observed,
                    std::span<const double> expected,
                    double min_expected = 5.0);

// One-sample Kolmogorov-Smirnov test against a CDF.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_test(std::vector<double> samples,
                 const std::function<double(double)>& cdf);

// FNV-1a, the stable content hash used for resume keys.
uint64_t fnv1a(std::string_view s);

}  // namespace lhv
