#include "lhv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace lhv {

namespace {
constexpr int kBlock = 64;

double pairwise(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  size_t half = x.size() / 2;
  return pairwise(x.first(half)) + pairwise(x.subspan(half));
}
}  // namespace

double block_tree_sum(std::span<const double> x) {
  if (x.empty()) return 0.0;
  std::vector<double> partial((x.size() + kBlock - 1) / kBlock);
  for (size_t p = 0; p < partial.size(); ++p) {
    size_t lo = p * kBlock, hi = std::min(x.size(), lo + kBlock);
    double s = 0.0;
    for (size_t i = lo; i < hi; ++i) s += x[i];
    partial[p] = s;
  }
  return pairwise(partial);
}

double median(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("median of empty range");
  size_t mid = x.size() / 2;
  std::nth_element(x.begin(), x.begin() + mid, x.end());
  double hi = x[mid];
  if (x.size() % 2) return hi;
  std::nth_element(x.begin(), x.begin() + mid - 1, x.begin() + mid);
  return 0.5 * (x[mid - 1] + hi);
}

double tail_median(std::span<const double> x, double frac) {
  if (x.empty()) throw std::invalid_argument("tail_median of empty range");
  size_t n = std::max<size_t>(1, static_cast<size_t>(x.size() * frac));
  return median(std::vector<double>(x.end() - n, x.end()));
}

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  // Newton iteration from the Chebyshev-like initial guess.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  return gl;
}

namespace {
double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa,
             double b, double fb, double m, double fm, double whole,
             double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(a, fa, m, fm, flm);
  double right = simpson(m, fm, b, fb, frm);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol, int max_depth) {
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = simpson(a, fa, b, fb, fm);
  return adapt(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

namespace {
// Lanczos approximation for log gamma.
double gamma_ln(double x) {
  static const double c[6] = {76.18009172947146,     -86.50532032941677,
                              24.01409824083091,     -1.231739572450155,
                              0.1208650973866179e-2, -0.5395239384953e-5};
  double y = x, tmp = x + 5.5;
  tmp -= (x + 0.5) * std::log(tmp);
  double ser = 1.000000000190015;
  for (int j = 0; j < 6; ++j) ser += c[j] / ++y;
  return -tmp + std::log(2.5066282746310005 * ser / x);
}

double gamma_p_series(double a, double x) {
  double ap = a, sum = 1.0 / a, del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - gamma_ln(a));
}

double gamma_q_cf(double a, double x) {
  const double eps = 1e-15, fpmin = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return std::exp(-x + a * std::log(x) - gamma_ln(a)) * h;
}
}  // namespace

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

Chi2Result chi2_gof(std::span<const double> observed,
                    std::span<const double> expected, double min_expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi2_gof: size mismatch");
  double pooled_obs = 0.0, pooled_exp = 0.0;
  Chi2Result r;
  int used = 0;
  for (size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] < min_expected) {
      pooled_obs += observed[i];
      pooled_exp += expected[i];
      continue;
    }
    double d = observed[i] - expected[i];
    r.statistic += d * d / expected[i];
    ++used;
  }
  if (pooled_exp > 0.0) {
    double d = pooled_obs - pooled_exp;
    r.statistic += d * d / pooled_exp;
    ++used;
  } else if (pooled_obs > 0.0) {
    // Counts landed where none were expected.
    r.statistic = std::numeric_limits<double>::infinity();
    ++used;
  }
  r.dof = std::max(1, used - 1);
  r.p_value = gamma_q(0.5 * r.dof, 0.5 * r.statistic);
  return r;
}

KsResult ks_test(std::vector<double> samples,
                 const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_test: empty sample");
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  KsResult r;
  for (size_t i = 0; i < samples.size(); ++i) {
    double c = cdf(samples[i]);
    double lo = i / n, hi = (i + 1) / n;
    r.statistic = std::max({r.statistic, std::abs(c - lo), std::abs(c - hi)});
  }
  double en = std::sqrt(n);
  double lambda = (en + 0.12 + 0.11 / en) * r.statistic;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    double term = 2.0 * std::pow(-1.0, j - 1) * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  r.p_value = std::clamp(sum, 0.0, 1.0);
  return r;
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace lhv
