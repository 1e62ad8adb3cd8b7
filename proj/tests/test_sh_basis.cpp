#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lhv/rng.hpp"
#include "lhv/sh_basis.hpp"

using namespace lhv;

namespace {
constexpr double kPi = 3.14159265358979323846;

double legendre_p(int l, double t) {
  switch (l) {
    case 1:
      return t;
    case 3:
      return 0.5 * (5 * t * t * t - 3 * t);
    case 5:
      return 0.125 * (63 * std::pow(t, 5) - 70 * t * t * t + 15 * t);
    default:
      return 0.0;
  }
}
}  // namespace

TEST_CASE("dimension bookkeeping") {
  CHECK(ShBasis::dim_for_degree(1) == 3);
  CHECK(ShBasis::dim_for_degree(3) == 10);
  CHECK(ShBasis::dim_for_degree(5) == 21);
  CHECK(ShBasis(1).dim() == 3);
  CHECK(ShBasis(5).dim() == 21);
  CHECK_THROWS_AS(ShBasis(0), std::invalid_argument);
  CHECK_THROWS_AS(ShBasis(2), std::invalid_argument);
  CHECK_THROWS_AS(ShBasis(4), std::invalid_argument);
}

TEST_CASE("component layout") {
  const ShBasis b(5);
  CHECK(b.index(1, -1) == 0);
  CHECK(b.index(1, 0) == 1);
  CHECK(b.index(1, 1) == 2);
  CHECK(b.index(3, -3) == 3);
  CHECK(b.index(3, 0) == 6);
  CHECK(b.index(3, 3) == 9);
  CHECK(b.index(5, -5) == 10);
  CHECK(b.index(5, 5) == 20);
  CHECK_THROWS_AS(b.index(2, 0), std::invalid_argument);
  CHECK_THROWS_AS(b.index(1, 2), std::invalid_argument);
}

TEST_CASE("north-pole values select the m=0 column") {
  const ShBasis b(5);
  std::vector<double> out(21);
  b.eval(0.0, 0.0, 1.0, out.data());
  for (int i = 0; i < 21; ++i) {
    const bool m0 = i == b.index(1, 0) || i == b.index(3, 0) || i == b.index(5, 0);
    if (!m0) CHECK(out[static_cast<size_t>(i)] == 0.0);
  }
  CHECK(out[static_cast<size_t>(b.index(1, 0))] ==
        doctest::Approx(std::sqrt(3.0 / (4 * kPi))).epsilon(1e-14));
  CHECK(out[static_cast<size_t>(b.index(3, 0))] ==
        doctest::Approx(std::sqrt(7.0 / (4 * kPi))).epsilon(1e-14));
  CHECK(out[static_cast<size_t>(b.index(5, 0))] ==
        doctest::Approx(std::sqrt(11.0 / (4 * kPi))).epsilon(1e-14));
}

TEST_CASE("degree one is the scaled direction") {
  const ShBasis b(1);
  const CounterRng rng(21, RngStream::Generic);
  const double c = std::sqrt(3.0 / (4 * kPi));
  for (int i = 0; i < 20; ++i) {
    const auto n = rng.sphere(0, static_cast<uint64_t>(i));
    double out[3];
    b.eval(n[0], n[1], n[2], out);
    CHECK(out[0] == doctest::Approx(c * n[1]).epsilon(1e-13));  // m=-1 -> y
    CHECK(out[1] == doctest::Approx(c * n[2]).epsilon(1e-13));  // m=0  -> z
    CHECK(out[2] == doctest::Approx(c * n[0]).epsilon(1e-13));  // m=+1 -> x
  }
}

TEST_CASE("addition theorem per degree") {
  // sum_m S_lm(u) S_lm(v) = (2l+1)/(4 pi) P_l(u.v) pins normalization and
  // rotation covariance at once.
  const ShBasis b(5);
  const CounterRng rng(22, RngStream::Generic);
  std::vector<double> su(21), sv(21);
  for (int t = 0; t < 30; ++t) {
    const auto u = rng.sphere(1, static_cast<uint64_t>(t));
    const auto v = rng.sphere(2, static_cast<uint64_t>(t));
    b.eval(u[0], u[1], u[2], su.data());
    b.eval(v[0], v[1], v[2], sv.data());
    const double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    for (const int l : {1, 3, 5}) {
      double acc = 0.0;
      for (int m = -l; m <= l; ++m) {
        acc += su[static_cast<size_t>(b.index(l, m))] * sv[static_cast<size_t>(b.index(l, m))];
      }
      CHECK(acc == doctest::Approx((2 * l + 1) / (4 * kPi) * legendre_p(l, dot)).epsilon(1e-11));
    }
  }
}

TEST_CASE("odd parity is bitwise in both precisions") {
  const ShBasis b(5);
  const CounterRng rng(23, RngStream::Generic);
  std::vector<double> plus(21), minus(21);
  std::vector<float> fplus(21), fminus(21);
  for (int t = 0; t < 50; ++t) {
    const auto n = rng.sphere(3, static_cast<uint64_t>(t));
    b.eval(n[0], n[1], n[2], plus.data());
    b.eval(-n[0], -n[1], -n[2], minus.data());
    b.eval(static_cast<float>(n[0]), static_cast<float>(n[1]), static_cast<float>(n[2]),
           fplus.data());
    b.eval(static_cast<float>(-n[0]), static_cast<float>(-n[1]), static_cast<float>(-n[2]),
           fminus.data());
    for (int i = 0; i < 21; ++i) {
      CHECK(minus[static_cast<size_t>(i)] == -plus[static_cast<size_t>(i)]);
      CHECK(fminus[static_cast<size_t>(i)] == -fplus[static_cast<size_t>(i)]);
    }
  }
}

TEST_CASE("float path tracks the double path") {
  const ShBasis b(5);
  const CounterRng rng(24, RngStream::Generic);
  std::vector<double> d(21);
  std::vector<float> f(21);
  for (int t = 0; t < 50; ++t) {
    const auto n = rng.sphere(4, static_cast<uint64_t>(t));
    b.eval(n[0], n[1], n[2], d.data());
    b.eval(static_cast<float>(n[0]), static_cast<float>(n[1]), static_cast<float>(n[2]), f.data());
    for (int i = 0; i < 21; ++i) {
      CHECK(std::abs(f[static_cast<size_t>(i)] - d[static_cast<size_t>(i)]) < 2e-6);
    }
  }
}
