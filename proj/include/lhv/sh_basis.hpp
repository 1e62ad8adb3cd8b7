#pragma once
// Real orthonormal spherical harmonics restricted to odd degrees
// 1, 3, ..., D. Odd degrees only: S(-n) = -S(n) holds bitwise, which the
// response rule needs so that flipping an outcome is exactly flipping the
// measurement direction.

#include <vector>

namespace lhv {

class ShBasis {
 public:
  explicit ShBasis(int degree);

  int degree() const { return degree_; }
  int dim() const { return dim_; }

  // Components per cloud dimension: sum of (2l+1) over odd l <= D.
  static int dim_for_degree(int degree) {
    return (degree + 1) * (degree + 2) / 2;
  }

  // Flat component index of (l, m); degrees ascending, m = -l..+l within one.
  int index(int l, int m) const;

  // Fills out[0..dim) at the unit vector (x, y, z). Fully normalized values;
  // the fixed-degree tables keep every intermediate O(1) in magnitude, so the
  // float path is safe.
  template <typename T>
  void eval(T x, T y, T z, T* out) const {
    const T* a;
    const T* b;
    const T* q0;
    if constexpr (sizeof(T) == sizeof(float)) {
      a = reinterpret_cast<const T*>(af_.data());
      b = reinterpret_cast<const T*>(bf_.data());
      q0 = reinterpret_cast<const T*>(q0f_.data());
    } else {
      a = reinterpret_cast<const T*>(a_.data());
      b = reinterpret_cast<const T*>(b_.data());
      q0 = reinterpret_cast<const T*>(q0_.data());
    }
    const int D = degree_;
    T cm = T(1), sm = T(0);
    for (int m = 0; m <= D; ++m) {
      if (m > 0) {
        T cn = x * cm - y * sm;
        T sn = x * sm + y * cm;
        cm = cn;
        sm = sn;
      }
      T pm0 = T(0);
      T pm1 = q0[m];
      for (int l = m; l <= D; ++l) {
        T p;
        if (l == m) {
          p = pm1;
        } else {
          p = a[l * (D + 1) + m] * z * pm1 - b[l * (D + 1) + m] * pm0;
          pm0 = pm1;
          pm1 = p;
        }
        if (l % 2 == 1) {
          int base = offsets_[l];
          if (m == 0) {
            out[base + l] = p;
          } else {
            out[base + l + m] = p * cm;
            out[base + l - m] = p * sm;
          }
        }
      }
    }
  }

 private:
  int degree_ = 1;
  int dim_ = 3;
  std::vector<double> a_, b_, q0_;
  std::vector<float> af_, bf_, q0f_;
  std::vector<int> offsets_;  // flat offset of each odd degree block
};

}  // namespace lhv
