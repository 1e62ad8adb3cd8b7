#include "lhv/sh_basis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lhv {

namespace {
constexpr int kMaxDegree = 19;
constexpr double kFourPi = 12.566370614359172953850573533118;
}  // namespace

ShBasis::ShBasis(int degree) : degree_(degree) {
  if (degree < 1 || degree > kMaxDegree || degree % 2 == 0)
    throw std::invalid_argument("ShBasis: degree must be odd, in [1, " +
                                std::to_string(kMaxDegree) + "], got " +
                                std::to_string(degree));
  dim_ = dim_for_degree(degree);
  const int D = degree;
  a_.assign((D + 1) * (D + 1), 0.0);
  b_.assign((D + 1) * (D + 1), 0.0);
  q0_.assign(D + 1, 0.0);
  offsets_.assign(D + 1, 0);

  for (int l = 1, off = 0; l <= D; l += 2) {
    offsets_[l] = off;
    off += 2 * l + 1;
  }

  for (int m = 0; m <= D; ++m) {
    // Normalized sectoral start, sqrt((2m+1)!! / (4 pi (2m)!!)); the sqrt(2)
    // for the cos/sin pair of real harmonics (m > 0) is folded in here.
    double q = 1.0 / kFourPi;
    for (int k = 1; k <= m; ++k) q *= (2.0 * k + 1.0) / (2.0 * k);
    q0_[m] = std::sqrt(q) * (m > 0 ? std::sqrt(2.0) : 1.0);
    for (int l = m + 1; l <= D; ++l) {
      double num_a = (4.0 * l * l - 1.0);
      double den = (double)(l - m) * (l + m);
      a_[l * (D + 1) + m] = std::sqrt(num_a / den);
      if (l >= m + 2) {
        double num_b = (2.0 * l + 1.0) * (l + m - 1.0) * (l - m - 1.0);
        b_[l * (D + 1) + m] = std::sqrt(num_b / ((2.0 * l - 3.0) * den));
      }
    }
  }

  af_.assign(a_.begin(), a_.end());
  bf_.assign(b_.begin(), b_.end());
  q0f_.assign(q0_.begin(), q0_.end());
}

int ShBasis::index(int l, int m) const {
  if (l < 1 || l > degree_ || l % 2 == 0 || m < -l || m > l)
    throw std::invalid_argument("ShBasis::index: bad (l, m)");
  return offsets_[l] + l + m;
}

}  // namespace lhv
