#include "lhv/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lhv/fastmath.hpp"

namespace lhv {

namespace {

// Upper clamp for probabilities in the working precision. 1 - 1e-12 is not
// representable in float; the largest value below 1 is used instead.
template <typename T>
T prob_clamp_hi() {
  if constexpr (sizeof(T) == sizeof(float))
    return std::nextafter(1.0f, 0.0f);
  else
    return 1.0 - 1e-12;
}

constexpr size_t kRowBlock = 64;

}  // namespace

template <typename T>
StepKernel<T>::StepKernel(uint64_t n_h, int spins, int dim, int batch)
    : n_h_(n_h),
      spins_(spins),
      dim_(dim),
      batch_(batch),
      clamp_lo_(T(1e-12)),
      clamp_hi_(prob_clamp_hi<T>()) {
  if (n_h < 1 || spins < 1 || dim < 1 || batch < 1)
    throw std::invalid_argument("StepKernel: all dimensions must be >= 1");
  const uint64_t b = static_cast<uint64_t>(batch);
  feat_.assign(static_cast<size_t>(spins) * dim * b, T(0));
  q_.assign(n_h * spins * b, T(0));
  w_.assign(n_h * b, T(0));
  p_.assign(b, T(0));
  g_.assign(b, T(0));
  lbuf_.assign(b, T(0));
  part_.assign(((n_h + kRowBlock - 1) / kRowBlock) * b, T(0));
}

template <typename T>
void StepKernel<T>::set_directions(const ShBasis& basis, const double* dirs) {
  if (basis.dim() != dim_)
    throw std::invalid_argument("StepKernel: basis dimension mismatch");
  std::vector<T> comp(static_cast<size_t>(dim_));
  for (int b = 0; b < batch_; ++b) {
    for (int j = 0; j < spins_; ++j) {
      const double* n = dirs + (static_cast<size_t>(b) * spins_ + j) * 3;
      basis.eval(static_cast<T>(n[0]), static_cast<T>(n[1]),
                 static_cast<T>(n[2]), comp.data());
      for (int k = 0; k < dim_; ++k)
        feat_[(static_cast<size_t>(j) * dim_ + k) * batch_ + b] = comp[k];
    }
  }
}

template <typename T>
void StepKernel<T>::forward(const T* cloud) {
  const int B = batch_;
  const int jd = spins_ * dim_;
#pragma omp parallel
  {
    std::vector<T> z(static_cast<size_t>(B));
#pragma omp for schedule(static)
    for (int64_t s = 0; s < static_cast<int64_t>(n_h_); ++s) {
      const T* lam = cloud + static_cast<uint64_t>(s) * jd;
      T* wrow = w_.data() + static_cast<uint64_t>(s) * B;
      for (int b = 0; b < B; ++b) wrow[b] = T(1);
      for (int j = 0; j < spins_; ++j) {
        T* zp = z.data();
        for (int b = 0; b < B; ++b) zp[b] = T(0);
        for (int k = 0; k < dim_; ++k) {
          const T c = lam[j * dim_ + k];
          const T* fr = feat_.data() + (static_cast<size_t>(j) * dim_ + k) * B;
#pragma omp simd
          for (int b = 0; b < B; ++b) zp[b] += c * fr[b];
        }
        T* qrow = q_.data() + (static_cast<uint64_t>(s) * spins_ + j) * B;
#pragma omp simd
        for (int b = 0; b < B; ++b) {
          T qv = soft_sigma(zp[b]);
          qrow[b] = qv;
          wrow[b] *= qv;
        }
      }
    }

    // Per-column partial sums over 64-row blocks; each block is one task, so
    // the partials are identical for any thread count.
    const int64_t nblk = static_cast<int64_t>((n_h_ + kRowBlock - 1) / kRowBlock);
#pragma omp for schedule(static)
    for (int64_t blk = 0; blk < nblk; ++blk) {
      uint64_t lo = static_cast<uint64_t>(blk) * kRowBlock;
      uint64_t hi = lo + kRowBlock < n_h_ ? lo + kRowBlock : n_h_;
      T* dst = part_.data() + static_cast<uint64_t>(blk) * B;
      for (int b = 0; b < B; ++b) dst[b] = T(0);
      for (uint64_t s = lo; s < hi; ++s) {
        const T* wrow = w_.data() + s * B;
#pragma omp simd
        for (int b = 0; b < B; ++b) dst[b] += wrow[b];
      }
    }
  }

  // Pairwise tree over block partials (cheap; serial keeps it simple).
  uint64_t m = (n_h_ + kRowBlock - 1) / kRowBlock;
  while (m > 1) {
    uint64_t half = m / 2;
    for (uint64_t i = 0; i < half; ++i) {
      T* dst = part_.data() + i * B;
      const T* a = part_.data() + (2 * i) * B;
      const T* b2 = part_.data() + (2 * i + 1) * B;
#pragma omp simd
      for (int b = 0; b < B; ++b) dst[b] = a[b] + b2[b];
    }
    if (m % 2) {
      T* dst = part_.data() + half * B;
      const T* src = part_.data() + (m - 1) * B;
      if (dst != src)
        for (int b = 0; b < B; ++b) dst[b] = src[b];
      m = half + 1;
    } else {
      m = half;
    }
  }
  const T inv = T(1) / static_cast<T>(n_h_);
  for (int b = 0; b < B; ++b) p_[b] = part_[b] * inv;
}

template <typename T>
T StepKernel<T>::loss_and_coeff(const double* pq) {
  const T one = T(1);
  for (int b = 0; b < batch_; ++b) {
    T P = p_[b];
    P = P < clamp_lo_ ? clamp_lo_ : (P > clamp_hi_ ? clamp_hi_ : P);
    double pqd = pq[b];
    pqd = pqd < 1e-12 ? 1e-12 : (pqd > 1.0 - 1e-12 ? 1.0 - 1e-12 : pqd);
    const T Q = static_cast<T>(pqd);
    const T omQ = one - Q;
    const T omP = one - P;
    T l1 = Q > T(0) ? Q * std::log(Q / P) : T(0);
    T l2 = omQ > T(0) ? omQ * std::log(omQ / omP) : T(0);
    // The true two-outcome KL is non-negative (Gibbs); near convergence the
    // value computed at working precision oscillates around zero at the
    // rounding scale, so clamp each element. This is what pins the plateau of
    // well-converged states at a small positive precision-dependent floor.
    const T l = l1 + l2;
    lbuf_[b] = l > T(0) ? l : T(0);
    g_[b] = (P - Q) / (P * omP);
  }
  return tree_sum(lbuf_.data(), static_cast<size_t>(batch_)) /
         static_cast<T>(batch_);
}

template <typename T>
void StepKernel<T>::backward(T* grad) const {
  const int B = batch_;
  const T scale =
      static_cast<T>(1.0 / (static_cast<double>(batch_) * static_cast<double>(n_h_)));
#pragma omp parallel
  {
    std::vector<T> c(static_cast<size_t>(B));
#pragma omp for schedule(static)
    for (int64_t s = 0; s < static_cast<int64_t>(n_h_); ++s) {
      const T* wrow = w_.data() + static_cast<uint64_t>(s) * B;
      T* gout = grad + static_cast<uint64_t>(s) * spins_ * dim_;
      for (int j = 0; j < spins_; ++j) {
        const T* qrow = q_.data() + (static_cast<uint64_t>(s) * spins_ + j) * B;
        T* cp = c.data();
#pragma omp simd
        for (int b = 0; b < B; ++b)
          cp[b] = g_[b] * wrow[b] * (T(1) - qrow[b]);
        for (int k = 0; k < dim_; ++k) {
          const T* fr = feat_.data() + (static_cast<size_t>(j) * dim_ + k) * B;
          gout[j * dim_ + k] = scale * dot_lanes(cp, fr, B);
        }
      }
    }
  }
}

template class StepKernel<float>;
template class StepKernel<double>;

}  // namespace lhv
