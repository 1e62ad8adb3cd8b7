#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lhv/config.hpp"
#include "lhv/quantum.hpp"
#include "lhv/records.hpp"
#include "lhv/statespec.hpp"
#include "lhv/train.hpp"

namespace lhv {

// Calibrated locality reference scale for one precision: the median plateau
// over a fixed panel of known-local states, with the single-scalar probe
// reported alongside as an algorithm-independent cross-check.
struct FloorEstimate {
  Precision precision = Precision::F32;
  double floor = 0.0;
  double probe = 0.0;
  std::vector<double> panel;               // per-state plateaus
  std::vector<std::string> panel_states;   // matching labels

  std::string to_json() const;
  static FloorEstimate from_json(const std::string& text);
  void save(const std::string& path) const;
  static FloorEstimate load(const std::string& path);
};

// Trains the panel (spin-up; random product states of 1..3 spins; noisy GHZ
// v=0.2 with 2 and 3 spins) under the given budget and takes the median.
FloorEstimate calibrate_floor(const TrainConfig& cfg);

struct SweepOptions {
  std::string records_path;    // empty: keep results in memory only
  std::string checkpoint_dir;  // empty: do not persist trained clouds
  double floor = 2e-8;
  double threshold_factor = 10.0;
  double boundary_factor = 3.0;
  int workers = 1;
};

// One grid point of any sweep: a state (prebuilt, so expensive ground-state
// solves are shared), the exact config to train with, and labels for the
// record. Jobs already present in the records file are skipped and their
// stored records returned instead (resume keyed on state + config identity).
struct PointJob {
  StateSpec spec;
  TrainConfig cfg;
  DensityMatrix rho;
  std::string param_name;
  double param_value = 0.0;
  std::string note;  // overlay context, JSON text or empty
  std::string pass;  // warm-start tag or empty
};

std::vector<SweepRecord> run_jobs(const std::vector<PointJob>& jobs, const SweepOptions& opts);

// Werner states, one record per (visibility, degree).
std::vector<SweepRecord> sweep_werner(const std::vector<double>& grid,
                                      const std::vector<int>& degrees, TrainConfig base,
                                      const SweepOptions& opts);

// Werner states with measurement directions confined to the x-y plane.
std::vector<SweepRecord> sweep_planar_werner(const std::vector<double>& grid, TrainConfig base,
                                             const SweepOptions& opts);

// Noisy GHZ and W families over a shared visibility grid.
std::vector<SweepRecord> sweep_ghz_w(const std::vector<double>& grid, TrainConfig base,
                                     const SweepOptions& opts);

// Overlay data for one XXZ-plane point, also serialized into the record note.
struct XxzPlanePoint {
  double cx = 0.0, cz = 0.0;
  bool physical = false;
  bool ppt_entangled = false;
  double min_pt_eigenvalue = 0.0;
  double chsh_m = 0.0;
  bool on_werner_diagonal = false;
};

// Full scan of the two-spin symmetric-state plane on an nx-by-nz grid over
// [-1,1]^2; non-physical points are skipped before any training happens.
// `points` (if non-null) receives the overlay grid including skipped points.
std::vector<SweepRecord> scan_xxz_plane(int nx, int nz, TrainConfig base,
                                        const SweepOptions& opts,
                                        std::vector<XxzPlanePoint>* points = nullptr);

// Boundary walks in the same plane. The first walk follows the CHSH curve
// M(cx,cz)=1 inside the physical region (two vertical segments joined by the
// lower unit-circle arc, restricted to cx <= 0 ... cx >= 0 mirror-equivalent
// states are relabelings, so the negative-cx half is walked); the second
// follows the empirical chain-attainable boundary traced by nearest-neighbor
// reduced states of long periodic chains over an anisotropy grid. Records use
// the normalized arc-length parameter; notes carry (cx, cz) and context.
std::vector<SweepRecord> scan_xxz_chsh_walk(int n_points, TrainConfig base,
                                            const SweepOptions& opts);
std::vector<SweepRecord> scan_xxz_physical_walk(const std::vector<double>& deltas,
                                                int chain_length, TrainConfig base,
                                                const SweepOptions& opts);

// Sub-chains of the XXZ ground state: one record per (delta, sub_size).
// Ground states are solved once per delta and reduced for each size.
std::vector<SweepRecord> sweep_xxz_chain(const std::vector<double>& deltas,
                                         const std::vector<int>& sub_sizes, int chain_length,
                                         bool periodic, TrainConfig base,
                                         const SweepOptions& opts);

// Marginal consistency check: for each chain record with a checkpoint,
// evaluate the trained cloud's two-site marginal against the exact two-site
// reduced state on a fresh batch of direction pairs.
struct MarginalRecord {
  std::string state_json;
  double delta = 0.0;
  int sub_size = 0;
  double train_plateau = 0.0;
  double marginal_loss = 0.0;
};

std::vector<MarginalRecord> evaluate_marginals(const std::vector<SweepRecord>& chain_records,
                                               int eval_batch, uint64_t seed);

// Fast oracle/property sweep used by the CLI validate subcommand.
struct ValidationReport {
  std::vector<std::pair<std::string, bool>> checks;
  std::vector<std::string> failures;
  bool all_ok() const { return failures.empty(); }
};

ValidationReport validate_suite(uint64_t seed);

}  // namespace lhv
