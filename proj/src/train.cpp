#include "lhv/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "lhv/kernels.hpp"
#include "lhv/rng.hpp"
#include "lhv/sampler.hpp"
#include "lhv/sh_basis.hpp"
#include "lhv/stats.hpp"

namespace lhv {

NumericError::NumericError(const std::string& what, int64_t at_step)
    : std::runtime_error(what + " at step " + std::to_string(at_step)), step(at_step) {}

double TrainingTrace::plateau() const { return tail_median(raw, 0.05); }

namespace {

template <typename T>
std::vector<T>& data_of(HiddenStateCloud& c);
template <>
std::vector<float>& data_of<float>(HiddenStateCloud& c) {
  return c.f32;
}
template <>
std::vector<double>& data_of<double>(HiddenStateCloud& c) {
  return c.f64;
}

using Clock = std::chrono::steady_clock;

template <typename T>
void run_loop(const DensityMatrix& rho, const TrainConfig& cfg, HiddenStateCloud& cloud,
              TrainResult& out) {
  const int spins = rho.n_spins;
  const ShBasis basis(cfg.degree);
  const int dim = basis.dim();
  const CorrelationTensor tensor(rho);
  const int64_t n_param = static_cast<int64_t>(cloud.size());
  std::vector<T>& lam = data_of<T>(cloud);

  StepKernel<T> kernel(cfg.n_hidden, spins, dim, cfg.batch);
  const CounterRng batch_rng(cfg.seed, RngStream::Batch);
  const CounterRng diff_rng(cfg.seed, RngStream::Diffusion);

  std::vector<double> pq(cfg.batch);
  std::vector<T> grad(static_cast<size_t>(n_param));
  const bool adam = cfg.optimizer.kind == OptimizerKind::Adam;
  std::vector<T> mom, vel;
  if (adam) {
    mom.assign(static_cast<size_t>(n_param), T(0));
    vel.assign(static_cast<size_t>(n_param), T(0));
  }
  double beta1_pow = 1.0, beta2_pow = 1.0;

  const int64_t diff_until =
      cfg.diffusion.enabled
          ? std::min<int64_t>(cfg.steps, static_cast<int64_t>(std::llround(
                                             cfg.diffusion.active_fraction *
                                             static_cast<double>(cfg.steps))))
          : 0;

  constexpr int kSmoothWindow = 10;
  int consecutive_below = 0;
  auto mark = Clock::now();
  int64_t steps_since_mark = 0;

  for (int64_t t = 0; t < cfg.steps; ++t) {
    const MeasurementBatch mb =
        sample_directions(batch_rng, static_cast<uint64_t>(t), spins, cfg.batch, cfg.sampler);
    kernel.set_directions(basis, mb.dirs.data());
    tensor.prob_all_up_batch(mb.dirs.data(), cfg.batch, pq.data());
    kernel.forward(lam.data());
    const double loss = static_cast<double>(kernel.loss_and_coeff(pq.data()));
    if (!std::isfinite(loss)) throw NumericError("non-finite loss", t);
    kernel.backward(grad.data());

    const double lr = cfg.lr_at(t);
    const T lr_t = static_cast<T>(lr);
    if (adam) {
      beta1_pow *= cfg.optimizer.beta1;
      beta2_pow *= cfg.optimizer.beta2;
      const T b1 = static_cast<T>(cfg.optimizer.beta1);
      const T b2 = static_cast<T>(cfg.optimizer.beta2);
      const T c1 = static_cast<T>(1) - b1;
      const T c2 = static_cast<T>(1) - b2;
      const T bc1 = static_cast<T>(1.0 / (1.0 - beta1_pow));
      const T bc2 = static_cast<T>(1.0 / (1.0 - beta2_pow));
      const T eps = static_cast<T>(cfg.optimizer.eps);
#pragma omp parallel for schedule(static)
      for (int64_t i = 0; i < n_param; ++i) {
        const T g = grad[static_cast<size_t>(i)];
        const T mi = b1 * mom[static_cast<size_t>(i)] + c1 * g;
        const T vi = b2 * vel[static_cast<size_t>(i)] + c2 * g * g;
        mom[static_cast<size_t>(i)] = mi;
        vel[static_cast<size_t>(i)] = vi;
        lam[static_cast<size_t>(i)] -= lr_t * (mi * bc1) / (std::sqrt(vi * bc2) + eps);
      }
    } else {
#pragma omp parallel for schedule(static)
      for (int64_t i = 0; i < n_param; ++i) {
        lam[static_cast<size_t>(i)] -= lr_t * grad[static_cast<size_t>(i)];
      }
    }

    if (t < diff_until) {
      const T noise = static_cast<T>(cfg.diffusion.amplitude * lr);
      const int64_t pairs = (n_param + 1) / 2;
#pragma omp parallel for schedule(static)
      for (int64_t pr = 0; pr < pairs; ++pr) {
        const auto z = diff_rng.normal2(static_cast<uint64_t>(t), static_cast<uint64_t>(pr));
        lam[static_cast<size_t>(2 * pr)] += noise * static_cast<T>(z[0]);
        if (2 * pr + 1 < n_param) lam[static_cast<size_t>(2 * pr + 1)] += noise * static_cast<T>(z[1]);
      }
    }

    ++steps_since_mark;
    const bool last = t + 1 == cfg.steps;
    if (t % cfg.trace_stride == 0 || last) {
      out.trace.steps.push_back(t);
      out.trace.raw.push_back(loss);
      const size_t n = out.trace.raw.size();
      const size_t w = std::min<size_t>(kSmoothWindow, n);
      double acc = 0.0;
      for (size_t i = n - w; i < n; ++i) acc += out.trace.raw[i];
      out.trace.smoothed.push_back(acc / static_cast<double>(w));

      const auto now = Clock::now();
      const double ms = std::chrono::duration<double, std::milli>(now - mark).count() /
                        static_cast<double>(steps_since_mark);
      out.trace.ms_per_step.push_back(ms);
      mark = now;
      steps_since_mark = 0;

      if (!cloud.finite()) throw NumericError("non-finite hidden state", t);
      if (cfg.stop_below_loss > 0.0) {
        if (out.trace.smoothed.back() < cfg.stop_below_loss) {
          if (++consecutive_below >= 3) {
            out.steps_run = t + 1;
            out.early_stopped = true;
            return;
          }
        } else {
          consecutive_below = 0;
        }
      }
    }
  }
  out.steps_run = cfg.steps;
}

}  // namespace

TrainResult train(const DensityMatrix& rho, const TrainConfig& cfg, const HiddenStateCloud* init) {
  cfg.validate();
  const int spins = rho.n_spins;
  const int dim = ShBasis::dim_for_degree(cfg.degree);

  TrainResult out;
  if (init != nullptr) {
    if (init->degree != cfg.degree || init->spins != spins ||
        init->samples != cfg.n_hidden) {
      throw std::invalid_argument("initial cloud shape does not match config/state");
    }
    out.cloud = init->to_precision(cfg.precision);
  } else {
    const double scale = cfg.init_scale > 0.0 ? cfg.init_scale : 1.0 / std::sqrt(double(dim));
    out.cloud = init_cloud(cfg.degree, spins, cfg.n_hidden, cfg.precision, cfg.seed, scale);
  }

  const auto t0 = Clock::now();
  if (cfg.precision == Precision::F32) {
    run_loop<float>(rho, cfg, out.cloud, out);
  } else {
    run_loop<double>(rho, cfg, out.cloud, out);
  }
  out.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return out;
}

std::vector<FamilyPoint> warm_start_sweep(const StateFamily& family,
                                          const std::vector<double>& grid,
                                          const TrainConfig& cfg) {
  std::vector<FamilyPoint> out;
  out.reserve(grid.size() * 2);
  for (int pass = 0; pass < 2; ++pass) {
    const char* tag = pass == 0 ? "asc" : "desc";
    HiddenStateCloud carry;
    bool have_carry = false;
    for (size_t i = 0; i < grid.size(); ++i) {
      const double v = pass == 0 ? grid[i] : grid[grid.size() - 1 - i];
      TrainResult r = train(family(v), cfg, have_carry ? &carry : nullptr);
      carry = r.cloud;
      have_carry = true;
      out.push_back(FamilyPoint{v, tag, std::move(r)});
    }
  }
  return out;
}

CriticalEstimate estimate_critical_visibility(const StateFamily& family, const TrainConfig& cfg,
                                              double floor, double threshold_factor, double lo,
                                              double hi, int iters, bool lo_known_local,
                                              bool hi_known_nonlocal) {
  if (lo > hi) throw std::invalid_argument("critical-visibility bracket is reversed");
  CriticalEstimate est;
  if (lo == hi) {
    est.value = est.bracket_lo = est.bracket_hi = lo;
    return est;
  }
  const double threshold = threshold_factor * floor;
  auto plateau_at = [&](double v) {
    const TrainResult r = train(family(v), cfg);
    const double p = r.trace.plateau();
    est.evaluations.emplace_back(v, p);
    return p;
  };

  if (!lo_known_local || !hi_known_nonlocal) {
    const double pl = lo_known_local ? 0.0 : plateau_at(lo);
    const double ph = hi_known_nonlocal ? threshold * 2 : plateau_at(hi);
    const bool lo_local = lo_known_local || pl <= threshold;
    const bool hi_local = !hi_known_nonlocal && ph <= threshold;
    if (!lo_local || hi_local) {
      throw std::runtime_error(
          "bracket endpoints do not straddle the locality threshold; scan a denser grid");
    }
  }
  for (int it = 0; it < iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (plateau_at(mid) <= threshold) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  est.value = 0.5 * (lo + hi);
  est.bracket_lo = lo;
  est.bracket_hi = hi;
  return est;
}

}  // namespace lhv
