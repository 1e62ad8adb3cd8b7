#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lhv/cloud.hpp"
#include "lhv/config.hpp"
#include "lhv/quantum.hpp"

namespace lhv {

// Raised when the loss or the cloud turns non-finite; carries the step index.
struct NumericError : std::runtime_error {
  int64_t step;
  NumericError(const std::string& what, int64_t at_step);
};

struct TrainingTrace {
  std::vector<int64_t> steps;
  std::vector<double> raw;          // loss as computed in the working precision
  std::vector<double> smoothed;     // mean of the trailing 10 recorded raws
  std::vector<double> ms_per_step;  // wall clock, excluded from determinism

  // Median of the final 5% of recorded raw losses; medians resist the
  // heavy-tailed batch noise near critical points.
  double plateau() const;
};

struct TrainResult {
  HiddenStateCloud cloud;
  TrainingTrace trace;
  int64_t steps_run = 0;
  bool early_stopped = false;
  double wall_seconds = 0.0;
};

// Runs the full optimization loop for one state. When `init` is given it must
// match the config's shape (degree, n_hidden) and the state's spin count; its
// values are converted to the configured precision. Bitwise deterministic for
// fixed (config, init), independent of the worker count.
TrainResult train(const DensityMatrix& rho, const TrainConfig& cfg,
                  const HiddenStateCloud* init = nullptr);

using StateFamily = std::function<DensityMatrix(double)>;

struct FamilyPoint {
  double param = 0.0;
  std::string pass;  // "asc" or "desc"
  TrainResult result;
};

// Two passes over the grid, ascending then descending, each run seeded from
// the previous grid point's trained cloud (the first run of each pass starts
// fresh). Used to diagnose the glassy regime: near the critical point the
// warm-started plateau degrades relative to independent initialization.
std::vector<FamilyPoint> warm_start_sweep(const StateFamily& family,
                                          const std::vector<double>& grid,
                                          const TrainConfig& cfg);

struct CriticalEstimate {
  double value = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::vector<std::pair<double, double>> evaluations;  // (param, plateau)
};

// Bisection on the family parameter. A point counts as local when its
// trained plateau is <= threshold_factor * floor. The initial bracket must
// straddle the transition (lo local, hi non-local) or an error demanding a
// denser scan is raised; lo == hi returns immediately. Endpoints already
// classified by a prior sweep can be declared known to skip retraining them.
CriticalEstimate estimate_critical_visibility(const StateFamily& family, const TrainConfig& cfg,
                                              double floor, double threshold_factor, double lo,
                                              double hi, int iters = 5, bool lo_known_local = false,
                                              bool hi_known_nonlocal = false);

}  // namespace lhv
