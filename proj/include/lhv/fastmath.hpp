#pragma once
// Branch-free float transcendentals for the hot loops, plus the fixed-shape
// summation helpers shared by the parallel kernels and the serial reference.
// Everything here is a pure element-wise function, so results never depend on
// the worker count.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <vector>

namespace lhv {

// exp(t) for t <= 0, clamped at -87 (result stays normal). About 2 ulp from
// a 6th-order kernel on |f| <= ln2/2; fully auto-vectorizable: rounding via
// floor, scaling via exponent-bit assembly.
inline float fast_expf(float t) {
  t = t < -87.0f ? -87.0f : t;
  float z = t * 1.4426950408889634f;
  float n = std::floor(z + 0.5f);
  // Cody-Waite split of ln 2.
  float f = (t - n * 0.693359375f) + n * 2.12194440e-4f;
  float p = 1.0f / 720.0f;
  p = p * f + 1.0f / 120.0f;
  p = p * f + 1.0f / 24.0f;
  p = p * f + 1.0f / 6.0f;
  p = p * f + 0.5f;
  p = p * f + 1.0f;
  p = p * f + 1.0f;
  uint32_t bits = static_cast<uint32_t>(static_cast<int32_t>(n) + 127) << 23;
  float scale;
  std::memcpy(&scale, &bits, sizeof scale);
  return p * scale;
}

// Logistic sigmoid. Both branches share one exp of -|z|, so large |z| never
// overflows and the two tails are computed at full relative accuracy.
inline float soft_sigma(float z) {
  float t = z < 0.0f ? z : -z;
  float e = fast_expf(t);
  float s = 1.0f / (1.0f + e);
  float sp = e / (1.0f + e);
  return z < 0.0f ? sp : s;
}

inline double soft_sigma(double z) {
  double t = z < 0.0 ? z : -z;
  double e = std::exp(t);
  double s = 1.0 / (1.0 + e);
  double sp = e / (1.0 + e);
  return z < 0.0 ? sp : s;
}

// Heaviside response with H(0) = 1/2; evaluation only, never trained.
template <typename T>
inline T hard_sigma(T z) {
  return z > T(0) ? T(1) : (z < T(0) ? T(0) : T(1) / T(2));
}

// Fixed-order scalar reduction: serial within blocks of 64, pairwise tree
// across block partials. Shape depends only on n.
template <typename T>
inline T tree_sum(const T* x, size_t n) {
  if (n == 0) return T(0);
  constexpr size_t kBlock = 64;
  size_t nblk = (n + kBlock - 1) / kBlock;
  // Small fixed stack for typical sizes; falls back to heap above it.
  T local[64];
  T* part = local;
  std::vector<T> heap;
  if (nblk > 64) {
    heap.resize(nblk);
    part = heap.data();
  }
  for (size_t blk = 0; blk < nblk; ++blk) {
    size_t lo = blk * kBlock;
    size_t hi = lo + kBlock < n ? lo + kBlock : n;
    T acc = T(0);
    for (size_t i = lo; i < hi; ++i) acc += x[i];
    part[blk] = acc;
  }
  size_t m = nblk;
  while (m > 1) {
    size_t half = m / 2;
    for (size_t i = 0; i < half; ++i) part[i] = part[2 * i] + part[2 * i + 1];
    if (m % 2) {
      part[half] = part[m - 1];
      m = half + 1;
    } else {
      m = half;
    }
  }
  return part[0];
}

// Dot product with eight independent accumulator lanes in a fixed combine
// order; the remainder is appended serially. Deterministic and wide enough
// for the vectorizer.
template <typename T>
inline T dot_lanes(const T* a, const T* b, int n) {
  T acc0 = T(0), acc1 = T(0), acc2 = T(0), acc3 = T(0);
  T acc4 = T(0), acc5 = T(0), acc6 = T(0), acc7 = T(0);
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 += a[i] * b[i];
    acc1 += a[i + 1] * b[i + 1];
    acc2 += a[i + 2] * b[i + 2];
    acc3 += a[i + 3] * b[i + 3];
    acc4 += a[i + 4] * b[i + 4];
    acc5 += a[i + 5] * b[i + 5];
    acc6 += a[i + 6] * b[i + 6];
    acc7 += a[i + 7] * b[i + 7];
  }
  T s = ((acc0 + acc1) + (acc2 + acc3)) + ((acc4 + acc5) + (acc6 + acc7));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace lhv
