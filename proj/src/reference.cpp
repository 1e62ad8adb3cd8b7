#include "lhv/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace lhv::ref {

namespace {

long double sigma_ld(long double z) {
  long double t = z < 0.0L ? z : -z;
  long double e = std::exp(t);
  long double s = 1.0L / (1.0L + e);
  long double sp = e / (1.0L + e);
  return z < 0.0L ? sp : s;
}

long double clamp_prob(long double x) {
  const long double lo = 1e-12L, hi = 1.0L - 1e-12L;
  return x < lo ? lo : (x > hi ? hi : x);
}

}  // namespace

StepResult step(const HiddenStateCloud& cloud, const ShBasis& basis,
                const double* dirs, int batch, const double* pq) {
  if (basis.dim() != cloud.dim)
    throw std::invalid_argument("reference step: basis dimension mismatch");
  const uint64_t n_h = cloud.samples;
  const int spins = cloud.spins;
  const int dim = cloud.dim;

  std::vector<double> feat(static_cast<size_t>(batch) * spins * dim);
  std::vector<double> comp(static_cast<size_t>(dim));
  for (int b = 0; b < batch; ++b)
    for (int j = 0; j < spins; ++j) {
      const double* n = dirs + (static_cast<size_t>(b) * spins + j) * 3;
      basis.eval(n[0], n[1], n[2], comp.data());
      for (int k = 0; k < dim; ++k)
        feat[(static_cast<size_t>(b) * spins + j) * dim + k] = comp[k];
    }

  std::vector<long double> q(n_h * static_cast<uint64_t>(spins) * batch);
  std::vector<long double> w(n_h * static_cast<uint64_t>(batch));
  StepResult out;
  out.p.resize(static_cast<size_t>(batch));
  out.grad.assign(n_h * static_cast<uint64_t>(spins) * dim, 0.0);

  std::vector<long double> g(static_cast<size_t>(batch));
  long double loss = 0.0L;
  for (int b = 0; b < batch; ++b) {
    long double acc = 0.0L;
    for (uint64_t s = 0; s < n_h; ++s) {
      long double prod = 1.0L;
      for (int j = 0; j < spins; ++j) {
        long double z = 0.0L;
        for (int k = 0; k < dim; ++k)
          z += static_cast<long double>(cloud.value(s, j, k)) *
               feat[(static_cast<size_t>(b) * spins + j) * dim + k];
        long double qv = sigma_ld(z);
        q[(s * spins + j) * batch + b] = qv;
        prod *= qv;
      }
      w[s * batch + b] = prod;
      acc += prod;
    }
    long double P = clamp_prob(acc / static_cast<long double>(n_h));
    out.p[b] = static_cast<double>(acc / static_cast<long double>(n_h));
    long double Q = clamp_prob(static_cast<long double>(pq[b]));
    const long double l =
        Q * std::log(Q / P) + (1.0L - Q) * std::log((1.0L - Q) / (1.0L - P));
    loss += l > 0.0L ? l : 0.0L;  // per-element non-negativity, as in the kernel
    g[b] = (P - Q) / (P * (1.0L - P));
  }
  out.loss = static_cast<double>(loss / batch);

  const long double scale =
      1.0L / (static_cast<long double>(batch) * static_cast<long double>(n_h));
  for (uint64_t s = 0; s < n_h; ++s)
    for (int j = 0; j < spins; ++j)
      for (int k = 0; k < dim; ++k) {
        long double acc = 0.0L;
        for (int b = 0; b < batch; ++b)
          acc += g[b] * w[s * batch + b] *
                 (1.0L - q[(s * spins + j) * batch + b]) *
                 feat[(static_cast<size_t>(b) * spins + j) * dim + k];
        out.grad[(s * spins + j) * dim + k] = static_cast<double>(scale * acc);
      }
  return out;
}

double prob_all_up(const HiddenStateCloud& cloud, const ShBasis& basis,
                   const double* dirs) {
  if (basis.dim() != cloud.dim)
    throw std::invalid_argument("reference prob: basis dimension mismatch");
  const int spins = cloud.spins;
  const int dim = cloud.dim;
  std::vector<double> feat(static_cast<size_t>(spins) * dim);
  std::vector<double> comp(static_cast<size_t>(dim));
  for (int j = 0; j < spins; ++j) {
    const double* n = dirs + static_cast<size_t>(j) * 3;
    basis.eval(n[0], n[1], n[2], comp.data());
    for (int k = 0; k < dim; ++k) feat[static_cast<size_t>(j) * dim + k] = comp[k];
  }
  long double acc = 0.0L;
  for (uint64_t s = 0; s < cloud.samples; ++s) {
    long double prod = 1.0L;
    for (int j = 0; j < spins; ++j) {
      long double z = 0.0L;
      for (int k = 0; k < dim; ++k)
        z += static_cast<long double>(cloud.value(s, j, k)) *
             feat[static_cast<size_t>(j) * dim + k];
      prod *= sigma_ld(z);
    }
    acc += prod;
  }
  return static_cast<double>(acc / static_cast<long double>(cloud.samples));
}

}  // namespace lhv::ref
