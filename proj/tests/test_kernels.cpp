#include <doctest.h>

#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lhv/cloud.hpp"
#include "lhv/fastmath.hpp"
#include "lhv/kernels.hpp"
#include "lhv/reference.hpp"
#include "lhv/rng.hpp"
#include "lhv/sampler.hpp"
#include "lhv/sh_basis.hpp"

using namespace lhv;

namespace {

struct Instance {
  HiddenStateCloud cloud;
  std::vector<double> dirs;
  std::vector<double> pq;
  int batch = 0;
};

Instance make_instance(int degree, int spins, uint64_t n_h, int batch, uint64_t seed,
                       Precision prec) {
  Instance in;
  in.batch = batch;
  in.cloud = init_cloud(degree, spins, n_h, prec, seed, 0.7);
  const CounterRng rng(seed, RngStream::Batch);
  SamplerSpec full;
  in.dirs = sample_directions(rng, 0, spins, batch, full).dirs;
  in.pq.resize(static_cast<size_t>(batch));
  for (int b = 0; b < batch; ++b) {
    in.pq[static_cast<size_t>(b)] = 0.05 + 0.9 * rng.uniform(1, static_cast<uint64_t>(b));
  }
  return in;
}

template <typename T>
struct KernelOut {
  double loss;
  std::vector<T> grad;
  std::vector<T> p;
};

template <typename T>
KernelOut<T> run_kernel(const Instance& in) {
  const ShBasis basis(in.cloud.degree);
  StepKernel<T> k(in.cloud.samples, in.cloud.spins, in.cloud.dim, in.batch);
  k.set_directions(basis, in.dirs.data());
  const T* data;
  if constexpr (sizeof(T) == 4) {
    data = reinterpret_cast<const T*>(in.cloud.f32.data());
  } else {
    data = reinterpret_cast<const T*>(in.cloud.f64.data());
  }
  k.forward(data);
  KernelOut<T> out;
  out.loss = k.loss_and_coeff(in.pq.data());
  out.grad.resize(in.cloud.size());
  k.backward(out.grad.data());
  out.p.assign(k.p(), k.p() + in.batch);
  return out;
}

}  // namespace

TEST_CASE("float kernel tracks the long-double reference") {
  for (int c = 0; c < 4; ++c) {
    const int degree = c % 2 ? 5 : 1;
    const int spins = 1 + c % 3;
    const Instance in = make_instance(degree, spins, 512, 64, 100 + c, Precision::F32);
    const auto got = run_kernel<float>(in);

    const HiddenStateCloud c64 = in.cloud.to_precision(Precision::F64);
    const ShBasis basis(degree);
    const ref::StepResult want = ref::step(c64, basis, in.dirs.data(), in.batch, in.pq.data());

    CHECK(std::abs(got.loss - want.loss) < 1e-6 * std::max(1.0, std::abs(want.loss)));
    for (int b = 0; b < in.batch; ++b) {
      CHECK(std::abs(static_cast<double>(got.p[b]) - want.p[b]) < 1e-5);
      CHECK(got.p[b] >= 0.0f);
      CHECK(got.p[b] <= 1.0f);
    }
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < want.grad.size(); ++i) {
      const double d = static_cast<double>(got.grad[i]) - want.grad[i];
      num += d * d;
      den += want.grad[i] * want.grad[i];
    }
    CHECK(std::sqrt(num) < 1e-3 * std::sqrt(den));
  }
}

TEST_CASE("double kernel reproduces the reference to near machine precision") {
  for (int c = 0; c < 3; ++c) {
    const Instance in = make_instance(c % 2 ? 3 : 5, 1 + c, 256, 48, 200 + c, Precision::F64);
    const auto got = run_kernel<double>(in);
    const ShBasis basis(in.cloud.degree);
    const ref::StepResult want =
        ref::step(in.cloud, basis, in.dirs.data(), in.batch, in.pq.data());

    CHECK(std::abs(got.loss - want.loss) < 1e-12 * std::max(1.0, std::abs(want.loss)));
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < want.grad.size(); ++i) {
      const double d = got.grad[i] - want.grad[i];
      num += d * d;
      den += want.grad[i] * want.grad[i];
    }
    CHECK(std::sqrt(num) < 1e-10 * std::max(std::sqrt(den), 1e-30));
  }
}

TEST_CASE("results are bitwise independent of the thread count") {
#ifdef _OPENMP
  const Instance in = make_instance(5, 2, 1024, 96, 300, Precision::F32);
  omp_set_num_threads(1);
  const auto one = run_kernel<float>(in);
  omp_set_num_threads(4);
  const auto four = run_kernel<float>(in);
  omp_set_num_threads(omp_get_num_procs());
  const auto all = run_kernel<float>(in);
  CHECK(one.loss == four.loss);
  CHECK(one.loss == all.loss);
  CHECK(one.grad == four.grad);
  CHECK(one.grad == all.grad);
  CHECK(one.p == four.p);
#endif
}

TEST_CASE("per-element loss clamp keeps the batch mean non-negative") {
  // A converged instance: probabilities equal targets, loss is pinned at the
  // rounding scale but never below zero.
  Instance in = make_instance(1, 1, 128, 32, 400, Precision::F32);
  const ShBasis basis(1);
  StepKernel<float> k(in.cloud.samples, in.cloud.spins, in.cloud.dim, in.batch);
  k.set_directions(basis, in.dirs.data());
  k.forward(in.cloud.f32.data());
  std::vector<double> pq(k.p(), k.p() + in.batch);  // pq = p exactly
  const float loss = k.loss_and_coeff(pq.data());
  CHECK(loss >= 0.0f);
  CHECK(loss < 1e-6f);
}

TEST_CASE("fast float exponential stays within a few ulp") {
  for (int i = 0; i <= 2000; ++i) {
    const float t = -88.0f + 88.0f * static_cast<float>(i) / 2000.0f;
    const float got = fast_expf(t);
    const double want = std::exp(static_cast<double>(std::max(t, -87.0f)));
    CHECK(std::abs(got - want) <= 4e-7 * want);
  }
  CHECK(fast_expf(0.0f) == 1.0f);
  CHECK(fast_expf(-200.0f) == doctest::Approx(std::exp(-87.0)).epsilon(1e-6));
}

TEST_CASE("sigmoid agrees across precisions and saturates safely") {
  for (int i = -60; i <= 60; ++i) {
    const double z = i * 0.5;
    const double d = soft_sigma(z);
    const float f = soft_sigma(static_cast<float>(z));
    CHECK(std::abs(static_cast<double>(f) - d) < 3e-7);
    CHECK(d > 0.0);
    CHECK(d < 1.0);
    CHECK(soft_sigma(z) + soft_sigma(-z) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(hard_sigma(0.0) == 0.5);
  CHECK(hard_sigma(3.0f) == 1.0f);
  CHECK(hard_sigma(-2.0) == 0.0);
}

TEST_CASE("deterministic reductions match plain sums") {
  std::vector<double> x;
  const CounterRng rng(9, RngStream::Generic);
  for (int i = 0; i < 1000; ++i) x.push_back(rng.uniform(0, static_cast<uint64_t>(i)) - 0.5);
  long double acc = 0.0L;
  for (const double v : x) acc += v;
  CHECK(tree_sum(x.data(), x.size()) ==
        doctest::Approx(static_cast<double>(acc)).epsilon(1e-13));

  std::vector<double> a(37), b(37);
  for (int i = 0; i < 37; ++i) {
    a[static_cast<size_t>(i)] = rng.uniform(1, static_cast<uint64_t>(i));
    b[static_cast<size_t>(i)] = rng.uniform(2, static_cast<uint64_t>(i)) - 0.5;
  }
  long double dd = 0.0L;
  for (int i = 0; i < 37; ++i) dd += a[static_cast<size_t>(i)] * b[static_cast<size_t>(i)];
  CHECK(dot_lanes(a.data(), b.data(), 37) ==
        doctest::Approx(static_cast<double>(dd)).epsilon(1e-14));
}
