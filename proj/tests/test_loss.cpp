#include <doctest.h>

#include <cmath>
#include <vector>

#include "lhv/cloud.hpp"
#include "lhv/loss.hpp"
#include "lhv/reference.hpp"
#include "lhv/rng.hpp"
#include "lhv/sampler.hpp"
#include "lhv/sh_basis.hpp"

using namespace lhv;

TEST_CASE("scalar loss reference value") {
  // kl(0.3, 0.5) = 0.3 ln 0.6 + 0.7 ln 1.4, frozen to ten digits.
  CHECK(kl_two_outcome<double>(0.3, 0.5) == doctest::Approx(0.0822828785).epsilon(1e-9));
  CHECK(kl_two_outcome<float>(0.3f, 0.5f) == doctest::Approx(0.0822828785).epsilon(1e-6));
  CHECK(kl_two_outcome<double>(0.5, 0.3) == doctest::Approx(0.087176693572).epsilon(1e-9));
}

TEST_CASE("loss is non-negative and zero only near agreement") {
  const CounterRng rng(51, RngStream::Generic);
  for (int t = 0; t < 2000; ++t) {
    const double q = rng.uniform(0, static_cast<uint64_t>(t));
    const double p = rng.uniform(1, static_cast<uint64_t>(t));
    const double d = kl_two_outcome<double>(q, p);
    const float fl = kl_two_outcome<float>(static_cast<float>(q), static_cast<float>(p));
    CHECK(d >= 0.0);
    CHECK(fl >= 0.0f);
    CHECK(std::isfinite(d));
    if (std::abs(p - q) > 0.01) CHECK(d > 0.0);
  }
  CHECK(kl_two_outcome<double>(0.37, 0.37) == 0.0);
  CHECK(kl_two_outcome<float>(0.37f, 0.37f) == 0.0f);
}

TEST_CASE("clamping keeps the loss finite at the probability edges") {
  for (const double q : {0.0, 1.0, 0.5}) {
    for (const double p : {0.0, 1.0, 0.5}) {
      const double v = kl_two_outcome<double>(q, p);
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
      const float vf = kl_two_outcome<float>(static_cast<float>(q), static_cast<float>(p));
      CHECK(std::isfinite(vf));
    }
  }
  // Mismatched edges are heavily penalized, agreement is free.
  CHECK(kl_two_outcome<double>(1.0, 0.0) > 20.0);
  CHECK(kl_two_outcome<double>(1.0, 1.0) == 0.0);
}

TEST_CASE("analytic gradient matches central differences") {
  const CounterRng rng(52, RngStream::Generic);
  for (int inst = 0; inst < 6; ++inst) {
    const int spins = 1 + inst % 3;
    const int degree = inst % 2 ? 3 : 1;
    HiddenStateCloud cloud = init_cloud(degree, spins, 6, Precision::F64, 500 + inst, 0.8);
    const ShBasis basis(degree);
    const int batch = 3;
    SamplerSpec full;
    const std::vector<double> dirs =
        sample_directions(rng, static_cast<uint64_t>(inst), spins, batch, full).dirs;
    std::vector<double> pq(batch);
    for (int b = 0; b < batch; ++b) {
      pq[static_cast<size_t>(b)] = 0.1 + 0.8 * rng.uniform(60 + inst, static_cast<uint64_t>(b));
    }

    const ref::StepResult base = ref::step(cloud, basis, dirs.data(), batch, pq.data());
    double worst = 0.0;
    for (size_t i = 0; i < cloud.f64.size(); ++i) {
      const double x = cloud.f64[i];
      const double h = 1e-5 * (1.0 + std::abs(x));
      cloud.f64[i] = x + h;
      const double lp = ref::step(cloud, basis, dirs.data(), batch, pq.data()).loss;
      cloud.f64[i] = x - h;
      const double lm = ref::step(cloud, basis, dirs.data(), batch, pq.data()).loss;
      cloud.f64[i] = x;
      const double fd = (lp - lm) / (2 * h);
      const double scale = std::max({std::abs(fd), std::abs(base.grad[i]), 1e-10});
      worst = std::max(worst, std::abs(fd - base.grad[i]) / scale);
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("scalar probe reads the datatype grain") {
  const ScalarProbeResult f32 = scalar_probe(Precision::F32);
  REQUIRE(f32.targets.size() == 5);
  REQUIRE(f32.per_target.size() == 5);
  CHECK(f32.plateau > 0.0);
  for (const double v : f32.per_target) CHECK(v >= 0.0);

  const ScalarProbeResult f64 = scalar_probe(Precision::F64);
  CHECK(f64.plateau >= 0.0);
  // The double probe converges orders of magnitude deeper than the float one.
  CHECK(f64.plateau < 1e-3 * f32.plateau);

  // Deterministic: the probe has no free state.
  CHECK(scalar_probe(Precision::F32).plateau == f32.plateau);
}
