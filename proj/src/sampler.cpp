#include "lhv/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace lhv {

namespace {

struct Frame {
  double e1[3];
  double e2[3];
};

// In-plane orthonormal frame for the plane orthogonal to `normal`. The exact
// z-axis gets the canonical (x, y) frame so planar-z directions have a
// bitwise-zero third component.
Frame plane_frame(const std::array<double, 3>& normal) {
  Frame f{};
  if (normal[0] == 0.0 && normal[1] == 0.0) {
    if (normal[2] == 0.0) throw std::invalid_argument("planar sampler: zero plane normal");
    f.e1[0] = 1.0;
    f.e2[1] = 1.0;
    return f;
  }
  const double norm = std::sqrt(normal[0] * normal[0] + normal[1] * normal[1] + normal[2] * normal[2]);
  const double n[3] = {normal[0] / norm, normal[1] / norm, normal[2] / norm};
  // Helper axis: the coordinate axis least aligned with n.
  int h = 0;
  if (std::abs(n[1]) < std::abs(n[h])) h = 1;
  if (std::abs(n[2]) < std::abs(n[h])) h = 2;
  double a[3] = {0.0, 0.0, 0.0};
  a[h] = 1.0;
  double e1[3] = {n[1] * a[2] - n[2] * a[1], n[2] * a[0] - n[0] * a[2], n[0] * a[1] - n[1] * a[0]};
  const double e1n = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  for (int i = 0; i < 3; ++i) f.e1[i] = e1[i] / e1n;
  f.e2[0] = n[1] * f.e1[2] - n[2] * f.e1[1];
  f.e2[1] = n[2] * f.e1[0] - n[0] * f.e1[2];
  f.e2[2] = n[0] * f.e1[1] - n[1] * f.e1[0];
  return f;
}

}  // namespace

MeasurementBatch sample_directions(const CounterRng& rng, uint64_t step, int spins, int batch,
                                   const SamplerSpec& sampler) {
  MeasurementBatch mb;
  mb.batch = batch;
  mb.spins = spins;
  mb.dirs.resize(static_cast<size_t>(batch) * spins * 3);

  if (sampler.kind == SamplerKind::FullSphere) {
    for (int b = 0; b < batch; ++b) {
      for (int j = 0; j < spins; ++j) {
        const uint64_t slot = static_cast<uint64_t>(b) * spins + j;
        const auto v = rng.sphere(step, slot);
        double* out = mb.dirs.data() + (static_cast<size_t>(b) * spins + j) * 3;
        out[0] = v[0];
        out[1] = v[1];
        out[2] = v[2];
      }
    }
    return mb;
  }

  const Frame f = plane_frame(sampler.normal);
  constexpr double two_pi = 6.283185307179586476925286766559;
  for (int b = 0; b < batch; ++b) {
    for (int j = 0; j < spins; ++j) {
      const uint64_t slot = static_cast<uint64_t>(b) * spins + j;
      const double phi = two_pi * rng.uniform(step, slot);
      const double c = std::cos(phi);
      const double s = std::sin(phi);
      double* out = mb.dirs.data() + (static_cast<size_t>(b) * spins + j) * 3;
      out[0] = c * f.e1[0] + s * f.e2[0];
      out[1] = c * f.e1[1] + s * f.e2[1];
      out[2] = c * f.e1[2] + s * f.e2[2];
    }
  }
  return mb;
}

}  // namespace lhv
