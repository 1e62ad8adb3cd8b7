#pragma once
// Training configuration: every field round-trips through JSON and has a CLI
// override. Defaults follow the reference hyperparameters; harness drivers
// substitute their own budgets per experiment.

#include <array>
#include <cstdint>
#include <string>

#include "lhv/cloud.hpp"

namespace lhv {

enum class SamplerKind { FullSphere, Planar };
enum class OptimizerKind { Adam, Sgd };

struct SamplerSpec {
  SamplerKind kind = SamplerKind::FullSphere;
  std::array<double, 3> normal = {0.0, 0.0, 1.0};  // plane normal (planar only)
};

struct DiffusionSpec {
  bool enabled = false;
  double amplitude = 1e-3;      // noise std as a multiple of the current lr
  double active_fraction = 0.5; // leading fraction of steps that get noise
};

struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::Adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  int64_t steps = 100000;
  int batch = 1024;
  double lr_per_sample = 2e-5;  // applied step is lr_per_sample * n_hidden
  int degree = 1;
  uint64_t n_hidden = 16384;
  Precision precision = Precision::F32;
  SamplerSpec sampler;
  DiffusionSpec diffusion;
  OptimizerSpec optimizer;
  uint64_t seed = 1;
  int64_t trace_stride = 25;

  // Schedule: lr stays constant through decay_start*steps, then decays
  // geometrically to lr * lr_final_factor at the last step.
  double lr_final_factor = 1.0;
  double decay_start = 0.6;

  // Gaussian init std; <= 0 means the default 1/sqrt(dim).
  double init_scale = 0.0;

  // Early stop: when > 0, stop once the smoothed loss has stayed below this
  // for three consecutive trace points.
  double stop_below_loss = 0.0;

  double effective_lr() const { return lr_per_sample * static_cast<double>(n_hidden); }
  double lr_at(int64_t step) const;
  void validate() const;  // throws std::invalid_argument

  std::string to_json() const;                       // pretty, stable key order
  static TrainConfig from_json(const std::string&);  // strict: unknown keys error
  static TrainConfig load_file(const std::string& path);

  // Stable content hash of the canonical JSON; part of every resume key.
  uint64_t hash() const;
};

}  // namespace lhv
