#pragma once

#include <cstdint>
#include <vector>

#include "lhv/config.hpp"
#include "lhv/rng.hpp"

namespace lhv {

// One batch of measurement settings: `batch` tuples of `spins` unit vectors.
// Row-major [tuple][spin][xyz], always double; kernels cast on ingest.
struct MeasurementBatch {
  int batch = 0;
  int spins = 0;
  std::vector<double> dirs;

  const double* tuple(int b) const { return dirs.data() + static_cast<size_t>(b) * spins * 3; }
  const double* dir(int b, int j) const { return tuple(b) + static_cast<size_t>(j) * 3; }
};

// Draws the settings for one optimization step. Counter layout: direction
// (b, j) of step t uses rng blocks derived from (t, b*spins + j), so batches
// are reproducible for any (step, batch, spins) independent of history.
// Full-sphere: normalized 3D Gaussians. Planar: uniform angle in the plane
// orthogonal to spec.normal; for the default z-normal the in-plane frame is
// (x, y) so the z component is exactly zero.
MeasurementBatch sample_directions(const CounterRng& rng, uint64_t step, int spins, int batch,
                                   const SamplerSpec& sampler);

}  // namespace lhv
