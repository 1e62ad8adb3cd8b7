#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "lhv/rng.hpp"
#include "lhv/sampler.hpp"
#include "lhv/stats.hpp"

using namespace lhv;

TEST_CASE("full-sphere batches are unit, reproducible, and counter-addressed") {
  const CounterRng rng(61, RngStream::Batch);
  SamplerSpec full;
  const MeasurementBatch mb = sample_directions(rng, 5, 3, 64, full);
  CHECK(mb.batch == 64);
  CHECK(mb.spins == 3);
  REQUIRE(mb.dirs.size() == 64u * 3u * 3u);
  for (int b = 0; b < 64; ++b) {
    for (int j = 0; j < 3; ++j) {
      const double* d = mb.dir(b, j);
      CHECK(d == mb.tuple(b) + 3 * j);
      CHECK(std::abs(d[0] * d[0] + d[1] * d[1] + d[2] * d[2] - 1.0) < 1e-12);
    }
  }
  const MeasurementBatch again = sample_directions(rng, 5, 3, 64, full);
  CHECK(mb.dirs == again.dirs);
  const MeasurementBatch next = sample_directions(rng, 6, 3, 64, full);
  CHECK(mb.dirs != next.dirs);

  // The (step, slot) addressing makes the draw independent of batch size:
  // a larger batch extends the settings without changing the shared prefix.
  const MeasurementBatch wide = sample_directions(rng, 5, 3, 128, full);
  for (size_t i = 0; i < mb.dirs.size(); ++i) CHECK(wide.dirs[i] == mb.dirs[i]);
}

TEST_CASE("sphere moments vanish") {
  const CounterRng rng(62, RngStream::Batch);
  SamplerSpec full;
  double mean[3] = {0, 0, 0};
  double cross = 0.0;
  const int steps = 200, batch = 500;
  for (int t = 0; t < steps; ++t) {
    const MeasurementBatch mb = sample_directions(rng, static_cast<uint64_t>(t), 1, batch, full);
    for (int b = 0; b < batch; ++b) {
      const double* d = mb.dir(b, 0);
      for (int k = 0; k < 3; ++k) mean[k] += d[k];
      cross += d[0] * d[1];
    }
  }
  const double n = static_cast<double>(steps) * batch;
  for (int k = 0; k < 3; ++k) CHECK(std::abs(mean[k] / n) < 0.005);
  CHECK(std::abs(cross / n) < 0.005);
}

TEST_CASE("planar sampler with the default normal zeroes z exactly") {
  const CounterRng rng(63, RngStream::Batch);
  SamplerSpec planar;
  planar.kind = SamplerKind::Planar;
  const MeasurementBatch mb = sample_directions(rng, 0, 2, 256, planar);
  std::vector<double> angles;
  for (int b = 0; b < 256; ++b) {
    for (int j = 0; j < 2; ++j) {
      const double* d = mb.dir(b, j);
      CHECK(d[2] == 0.0);
      CHECK(std::abs(d[0] * d[0] + d[1] * d[1] - 1.0) < 1e-12);
      angles.push_back(std::atan2(d[1], d[0]));
    }
  }
  constexpr double kPi = 3.14159265358979323846;
  const auto ks = ks_test(angles, [&](double a) { return (a + kPi) / (2 * kPi); });
  CHECK(ks.p_value > 0.001);
}

TEST_CASE("planar sampler honors a tilted normal") {
  const CounterRng rng(64, RngStream::Batch);
  SamplerSpec planar;
  planar.kind = SamplerKind::Planar;
  planar.normal = {1.0, -2.0, 0.5};
  const double nn = std::sqrt(1.0 + 4.0 + 0.25);
  const MeasurementBatch mb = sample_directions(rng, 3, 1, 200, planar);
  for (int b = 0; b < 200; ++b) {
    const double* d = mb.dir(b, 0);
    const double along =
        (d[0] * planar.normal[0] + d[1] * planar.normal[1] + d[2] * planar.normal[2]) / nn;
    CHECK(std::abs(along) < 1e-12);
    CHECK(std::abs(d[0] * d[0] + d[1] * d[1] + d[2] * d[2] - 1.0) < 1e-12);
  }
}

TEST_CASE("degenerate sampler inputs are rejected") {
  const CounterRng rng(65, RngStream::Batch);
  SamplerSpec planar;
  planar.kind = SamplerKind::Planar;
  planar.normal = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(sample_directions(rng, 0, 1, 8, planar), std::invalid_argument);
}
