#pragma once
// Counter-based RNG. Every random quantity in the library is a pure function
// of (seed, stream, counter), so seeds are portable across platforms and
// draws are independent of evaluation order and worker count.

#include <array>
#include <cmath>
#include <cstdint>

namespace lhv {

inline constexpr const char* kRngName = "philox4x32-10/v1";

// Logical stream ids. New streams must be appended, never renumbered.
enum class RngStream : uint32_t {
  CloudInit = 0,
  Batch = 1,
  Diffusion = 2,
  SeparableCloud = 3,
  Lanczos = 4,
  Probe = 5,
  Generic = 8,
};

namespace detail {

inline void philox_mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  uint64_t p = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(p >> 32);
  lo = static_cast<uint32_t>(p);
}

}  // namespace detail

struct Philox4x32 {
  static constexpr uint32_t kMul0 = 0xD2511F53u;
  static constexpr uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<uint32_t, 4> block(std::array<uint32_t, 2> key,
                                       std::array<uint32_t, 4> ctr) {
    for (int round = 0; round < 10; ++round) {
      uint32_t hi0, lo0, hi1, lo1;
      detail::philox_mulhilo(kMul0, ctr[0], hi0, lo0);
      detail::philox_mulhilo(kMul1, ctr[2], hi1, lo1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }
};

// One keyed stream of counter-addressed random blocks.
class CounterRng {
 public:
  CounterRng(uint64_t seed, RngStream stream)
      : key_{static_cast<uint32_t>(seed),
             static_cast<uint32_t>(seed >> 32) ^
                 (0x61C88647u * static_cast<uint32_t>(stream))} {}

  // 128-bit counter split as (a, b): a indexes the coarse unit (step, sample),
  // b the draw within it.
  std::array<uint32_t, 4> block(uint64_t a, uint64_t b) const {
    return Philox4x32::block(
        key_, {static_cast<uint32_t>(a), static_cast<uint32_t>(a >> 32),
               static_cast<uint32_t>(b), static_cast<uint32_t>(b >> 32)});
  }

  static uint64_t join(uint32_t lo, uint32_t hi) {
    return static_cast<uint64_t>(hi) << 32 | lo;
  }

  // Strictly inside (0,1); safe as a log argument.
  static double to_unit(uint64_t x) {
    return (static_cast<double>(x >> 12) + 0.5) * 0x1p-52;
  }

  double uniform(uint64_t a, uint64_t b) const {
    auto blk = block(a, b);
    return to_unit(join(blk[0], blk[1]));
  }

  // Two standard normals from one block (Box-Muller).
  std::array<double, 2> normal2(uint64_t a, uint64_t b) const {
    auto blk = block(a, b);
    double u1 = to_unit(join(blk[0], blk[1]));
    double u2 = to_unit(join(blk[2], blk[3]));
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(t), r * std::sin(t)};
  }

  // Unit vector on the sphere via normalized Gaussians. Retries (degenerate
  // norm, probability ~2^-100) jump to high counter bits so neighboring
  // direction indices never share blocks.
  std::array<double, 3> sphere(uint64_t a, uint64_t b) const {
    for (uint64_t attempt = 0;; ++attempt) {
      uint64_t base = 2 * b + (attempt << 48);
      auto n01 = normal2(a, base);
      auto n23 = normal2(a, base + 1);
      double x = n01[0], y = n01[1], z = n23[0];
      double nrm = std::sqrt(x * x + y * y + z * z);
      if (nrm > 1e-12) return {x / nrm, y / nrm, z / nrm};
    }
  }

 private:
  std::array<uint32_t, 2> key_;
};

}  // namespace lhv
