// Timing and equivalence harness for the optimization step: serial reference
// vs the blocked kernel at one thread and at the machine's full thread count.
// The two kernel runs must agree bitwise; the reference bounds the error.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lhv/cloud.hpp"
#include "lhv/kernels.hpp"
#include "lhv/reference.hpp"
#include "lhv/rng.hpp"
#include "lhv/sampler.hpp"
#include "lhv/sh_basis.hpp"

namespace {

struct StepInputs {
  lhv::HiddenStateCloud cloud;
  std::vector<double> dirs;
  std::vector<double> pq;
};

StepInputs make_inputs(int degree, int spins, uint64_t n_h, int batch, uint64_t seed) {
  StepInputs in;
  in.cloud = lhv::init_cloud(degree, spins, n_h, lhv::Precision::F32, seed, 0.6);
  const lhv::CounterRng rng(seed, lhv::RngStream::Batch);
  lhv::SamplerSpec sampler;
  const lhv::MeasurementBatch mb = lhv::sample_directions(rng, 0, spins, batch, sampler);
  in.dirs = mb.dirs;
  in.pq.resize(static_cast<size_t>(batch));
  for (int b = 0; b < batch; ++b) {
    in.pq[static_cast<size_t>(b)] = 0.1 + 0.8 * rng.uniform(1, static_cast<uint64_t>(b));
  }
  return in;
}

struct KernelRun {
  double loss = 0.0;
  std::vector<float> grad;
  double ms = 0.0;
};

KernelRun run_kernel(const StepInputs& in, int batch, int threads, int reps) {
#ifdef _OPENMP
  omp_set_num_threads(threads);
#else
  (void)threads;
#endif
  const lhv::ShBasis basis(in.cloud.degree);
  lhv::StepKernel<float> kernel(in.cloud.samples, in.cloud.spins, in.cloud.dim, batch);
  kernel.set_directions(basis, in.dirs.data());
  std::vector<float> grad(in.cloud.f32.size());

  KernelRun out;
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) {
    kernel.forward(in.cloud.f32.data());
    out.loss = kernel.loss_and_coeff(in.pq.data());
    kernel.backward(grad.data());
  }
  const auto t1 = std::chrono::steady_clock::now();
  out.ms = std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
  out.grad = std::move(grad);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"step kernel timing and agreement"};
  uint64_t n_h = 16384;
  int batch = 512, spins = 2, degree = 5, reps = 10;
  uint64_t seed = 1;
  app.add_option("--nh", n_h, "hidden samples");
  app.add_option("--batch", batch, "tuples per step");
  app.add_option("--spins", spins, "spins");
  app.add_option("--degree", degree, "model degree");
  app.add_option("--reps", reps, "timed repetitions");
  app.add_option("--seed", seed, "input seed");
  CLI11_PARSE(app, argc, argv);

  const StepInputs in = make_inputs(degree, spins, n_h, batch, seed);
  std::printf("n_hidden=%llu batch=%d spins=%d degree=%d reps=%d\n",
              static_cast<unsigned long long>(n_h), batch, spins, degree, reps);

  // Serial reference on the same inputs, in double.
  lhv::HiddenStateCloud c64 = in.cloud.to_precision(lhv::Precision::F64);
  const lhv::ShBasis basis(in.cloud.degree);
  const auto r0 = std::chrono::steady_clock::now();
  const lhv::ref::StepResult ref = lhv::ref::step(c64, basis, in.dirs.data(), batch, in.pq.data());
  const auto r1 = std::chrono::steady_clock::now();
  const double ref_ms = std::chrono::duration<double, std::milli>(r1 - r0).count();

  int max_threads = 1;
#ifdef _OPENMP
  max_threads = omp_get_max_threads();
#endif
  const KernelRun one = run_kernel(in, batch, 1, reps);
  const KernelRun many = run_kernel(in, batch, max_threads, reps);

  std::printf("reference (serial, f64): loss=%.9e  %.2f ms/step\n", ref.loss, ref_ms);
  std::printf("kernel 1 thread:  loss=%.9e  %.2f ms/step\n", one.loss, one.ms);
  std::printf("kernel %d threads: loss=%.9e  %.2f ms/step  speedup x%.2f\n", max_threads,
              many.loss, many.ms, one.ms / many.ms);

  bool bitwise = one.loss == many.loss && one.grad.size() == many.grad.size();
  if (bitwise) {
    for (size_t i = 0; i < one.grad.size(); ++i) {
      if (one.grad[i] != many.grad[i]) {
        bitwise = false;
        break;
      }
    }
  }
  std::printf("thread-count invariance: %s\n", bitwise ? "bitwise equal" : "MISMATCH");

  const double loss_err = std::abs(one.loss - ref.loss) / std::max(std::abs(ref.loss), 1e-30);
  double grad_num = 0.0, grad_den = 0.0;
  for (size_t i = 0; i < ref.grad.size(); ++i) {
    const double d = static_cast<double>(one.grad[i]) - ref.grad[i];
    grad_num += d * d;
    grad_den += ref.grad[i] * ref.grad[i];
  }
  const double grad_err = std::sqrt(grad_num) / std::max(std::sqrt(grad_den), 1e-300);
  std::printf("vs reference: loss rel err %.3e, grad rel err %.3e\n", loss_err, grad_err);

  const bool ok = bitwise && loss_err < 1e-4 && grad_err < 1e-3;
  std::printf("%s\n", ok ? "bench ok" : "bench FAILED");
  return ok ? 0 : 1;
}
