#include "lhv/cloud.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>

#include <json.hpp>

#include "lhv/sh_basis.hpp"

// Checkpoints are written in native byte order; the format is defined as
// little-endian, which this build target must therefore be.
static_assert(std::endian::native == std::endian::little);

namespace lhv {

namespace {

constexpr char kMagic[4] = {'L', 'H', 'V', 'C'};
constexpr uint32_t kFormatVersion = 1;
constexpr double kPi = 3.14159265358979323846;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_bytes(std::FILE* f, const void* p, size_t n, const std::string& path) {
  if (std::fwrite(p, 1, n, f) != n)
    throw std::runtime_error("checkpoint write failed: " + path);
}

void read_bytes(std::FILE* f, void* p, size_t n, const std::string& path) {
  if (std::fread(p, 1, n, f) != n)
    throw std::runtime_error("checkpoint truncated: " + path);
}

}  // namespace

const char* precision_name(Precision p) {
  return p == Precision::F32 ? "f32" : "f64";
}

Precision precision_from_name(const std::string& name) {
  if (name == "f32") return Precision::F32;
  if (name == "f64") return Precision::F64;
  throw std::invalid_argument("unknown precision '" + name + "' (f32|f64)");
}

void HiddenStateCloud::allocate() {
  if (precision == Precision::F32) {
    f32.assign(size(), 0.0f);
    f64.clear();
  } else {
    f64.assign(size(), 0.0);
    f32.clear();
  }
}

bool HiddenStateCloud::finite() const {
  if (precision == Precision::F32) {
    for (float v : f32)
      if (!std::isfinite(v)) return false;
  } else {
    for (double v : f64)
      if (!std::isfinite(v)) return false;
  }
  return true;
}

double HiddenStateCloud::value(uint64_t sample, int spin, int comp) const {
  uint64_t i = offset(sample, spin) + static_cast<uint64_t>(comp);
  return precision == Precision::F32 ? static_cast<double>(f32[i]) : f64[i];
}

void HiddenStateCloud::set_value(uint64_t sample, int spin, int comp, double v) {
  uint64_t i = offset(sample, spin) + static_cast<uint64_t>(comp);
  if (precision == Precision::F32)
    f32[i] = static_cast<float>(v);
  else
    f64[i] = v;
}

HiddenStateCloud HiddenStateCloud::to_precision(Precision p) const {
  if (p == precision) return *this;
  HiddenStateCloud out = *this;
  out.precision = p;
  out.allocate();
  const uint64_t n = size();
  if (p == Precision::F32) {
    for (uint64_t i = 0; i < n; ++i) out.f32[i] = static_cast<float>(f64[i]);
  } else {
    for (uint64_t i = 0; i < n; ++i) out.f64[i] = static_cast<double>(f32[i]);
  }
  return out;
}

HiddenStateCloud init_cloud(int degree, int spins, uint64_t samples,
                            Precision prec, uint64_t seed, double scale) {
  if (spins < 1) throw std::invalid_argument("init_cloud: spins must be >= 1");
  if (samples < 1) throw std::invalid_argument("init_cloud: samples must be >= 1");
  HiddenStateCloud c;
  c.precision = prec;
  c.degree = degree;
  c.spins = spins;
  c.dim = ShBasis::dim_for_degree(degree);
  c.samples = samples;
  c.allocate();
  CounterRng rng(seed, RngStream::CloudInit);
  const int per_sample = spins * c.dim;
  for (uint64_t s = 0; s < samples; ++s) {
    for (int k = 0; k < per_sample; k += 2) {
      auto z = rng.normal2(s, static_cast<uint64_t>(k / 2));
      uint64_t base = c.offset(s, 0) + static_cast<uint64_t>(k);
      if (c.precision == Precision::F32) {
        c.f32[base] = static_cast<float>(scale * z[0]);
        if (k + 1 < per_sample) c.f32[base + 1] = static_cast<float>(scale * z[1]);
      } else {
        c.f64[base] = scale * z[0];
        if (k + 1 < per_sample) c.f64[base + 1] = scale * z[1];
      }
    }
  }
  return c;
}

void save_cloud(const HiddenStateCloud& c, const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_bytes(f.get(), kMagic, 4, path);
  uint32_t version = kFormatVersion;
  uint8_t prec = static_cast<uint8_t>(c.precision);
  uint32_t deg = static_cast<uint32_t>(c.degree);
  uint32_t spins = static_cast<uint32_t>(c.spins);
  uint32_t dim = static_cast<uint32_t>(c.dim);
  uint64_t samples = c.samples;
  write_bytes(f.get(), &version, sizeof version, path);
  write_bytes(f.get(), &prec, sizeof prec, path);
  write_bytes(f.get(), &deg, sizeof deg, path);
  write_bytes(f.get(), &spins, sizeof spins, path);
  write_bytes(f.get(), &dim, sizeof dim, path);
  write_bytes(f.get(), &samples, sizeof samples, path);
  if (c.precision == Precision::F32)
    write_bytes(f.get(), c.f32.data(), c.f32.size() * sizeof(float), path);
  else
    write_bytes(f.get(), c.f64.data(), c.f64.size() * sizeof(double), path);
  if (std::fflush(f.get()) != 0)
    throw std::runtime_error("checkpoint flush failed: " + path);
}

HiddenStateCloud load_cloud(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[4];
  read_bytes(f.get(), magic, 4, path);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a cloud checkpoint (bad magic): " + path);
  uint32_t version = 0;
  read_bytes(f.get(), &version, sizeof version, path);
  if (version != kFormatVersion)
    throw std::runtime_error("unsupported checkpoint version " +
                             std::to_string(version) + ": " + path);
  uint8_t prec = 0;
  uint32_t deg = 0, spins = 0, dim = 0;
  uint64_t samples = 0;
  read_bytes(f.get(), &prec, sizeof prec, path);
  read_bytes(f.get(), &deg, sizeof deg, path);
  read_bytes(f.get(), &spins, sizeof spins, path);
  read_bytes(f.get(), &dim, sizeof dim, path);
  read_bytes(f.get(), &samples, sizeof samples, path);
  if (prec > 1)
    throw std::runtime_error("bad precision flag in checkpoint: " + path);
  HiddenStateCloud c;
  c.precision = static_cast<Precision>(prec);
  c.degree = static_cast<int>(deg);
  c.spins = static_cast<int>(spins);
  c.dim = static_cast<int>(dim);
  c.samples = samples;
  if (c.spins < 1 || c.samples < 1 ||
      c.dim != ShBasis::dim_for_degree(c.degree))
    throw std::runtime_error("inconsistent checkpoint header: " + path);
  c.allocate();
  if (c.precision == Precision::F32)
    read_bytes(f.get(), c.f32.data(), c.f32.size() * sizeof(float), path);
  else
    read_bytes(f.get(), c.f64.data(), c.f64.size() * sizeof(double), path);
  char extra;
  if (std::fread(&extra, 1, 1, f.get()) == 1)
    throw std::runtime_error("trailing bytes after checkpoint payload: " + path);
  return c;
}

std::string cloud_to_json(const HiddenStateCloud& c, uint64_t max_samples) {
  nlohmann::json j;
  j["format"] = "lhv-cloud";
  j["version"] = kFormatVersion;
  j["precision"] = precision_name(c.precision);
  j["degree"] = c.degree;
  j["spins"] = c.spins;
  j["dim"] = c.dim;
  j["samples"] = c.samples;
  uint64_t keep = (max_samples == 0) ? c.samples : std::min(max_samples, c.samples);
  j["samples_exported"] = keep;
  nlohmann::json data = nlohmann::json::array();
  for (uint64_t s = 0; s < keep; ++s) {
    nlohmann::json row = nlohmann::json::array();
    for (int sp = 0; sp < c.spins; ++sp) {
      nlohmann::json vec = nlohmann::json::array();
      for (int k = 0; k < c.dim; ++k) vec.push_back(c.value(s, sp, k));
      row.push_back(std::move(vec));
    }
    data.push_back(std::move(row));
  }
  j["data"] = std::move(data);
  return j.dump();
}

double exact_single_spin_density(const Eigen::Vector3d& r,
                                 const Eigen::Vector3d& lam) {
  double rn = r.norm();
  if (rn > 1.0 + 1e-9)
    throw std::invalid_argument("Bloch vector norm exceeds 1");
  rn = std::min(rn, 1.0);
  double rl = r.dot(lam);
  double val = (1.0 - rn) / (4.0 * kPi);
  if (rl > 0.0) val += rl / kPi;
  return val;
}

Eigen::Vector3d sample_exact_single_spin(const Eigen::Vector3d& r,
                                         const CounterRng& rng, uint64_t a,
                                         uint64_t q) {
  double rn = r.norm();
  if (rn > 1.0 + 1e-9)
    throw std::invalid_argument("Bloch vector norm exceeds 1");
  rn = std::min(rn, 1.0);
  // Constant envelope over the uniform proposal; acceptance rate >= 1/4.
  const double env = rn / kPi + (1.0 - rn) / (4.0 * kPi);
  constexpr int kMaxAttempts = 10000;
  for (int t = 0; t < kMaxAttempts; ++t) {
    // Attempt t uses raw blocks {2m, 2m+1} for the direction and a disjoint
    // high-bit block for the acceptance draw.
    uint64_t m = q + static_cast<uint64_t>(t);
    auto d = rng.sphere(a, m);
    Eigen::Vector3d lam(d[0], d[1], d[2]);
    double u = rng.uniform(a, 2 * m + (uint64_t{1} << 62));
    if (u * env <= exact_single_spin_density(r, lam)) return lam;
  }
  throw std::runtime_error("single-spin rejection sampler exceeded attempt cap");
}

HiddenStateCloud separable_cloud(int spins, uint64_t samples, uint64_t seed,
                                 double scale, const BlochAssignment& assign,
                                 Precision prec) {
  HiddenStateCloud c;
  c.precision = prec;
  c.degree = 1;
  c.spins = spins;
  c.dim = 3;
  c.samples = samples;
  c.allocate();
  CounterRng rng(seed, RngStream::SeparableCloud);
  std::vector<Eigen::Vector3d> blochs(static_cast<size_t>(spins));
  for (uint64_t s = 0; s < samples; ++s) {
    assign(s, blochs);
    for (int j = 0; j < spins; ++j) {
      Eigen::Vector3d lam = sample_exact_single_spin(
          blochs[static_cast<size_t>(j)], rng, s, static_cast<uint64_t>(j) << 20);
      // Degree-1 components are ordered (m=-1,0,+1) <-> (y,z,x), so the
      // feature dot product is proportional to n.lam.
      c.set_value(s, j, 0, scale * lam.y());
      c.set_value(s, j, 1, scale * lam.z());
      c.set_value(s, j, 2, scale * lam.x());
    }
  }
  return c;
}

BlochAssignment product_assignment(std::vector<Eigen::Vector3d> blochs) {
  return [blochs = std::move(blochs)](uint64_t, std::vector<Eigen::Vector3d>& out) {
    if (out.size() != blochs.size())
      throw std::invalid_argument("product_assignment: spin count mismatch");
    out = blochs;
  };
}

BlochAssignment mixture_assignment(
    std::vector<double> weights,
    std::vector<std::vector<Eigen::Vector3d>> components, uint64_t seed) {
  if (weights.empty() || weights.size() != components.size())
    throw std::invalid_argument("mixture_assignment: weights/components mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("mixture_assignment: negative weight");
    total += w;
  }
  if (total <= 0.0)
    throw std::invalid_argument("mixture_assignment: zero total weight");
  std::vector<double> cdf(weights.size());
  double acc = 0.0;
  for (size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k] / total;
    cdf[k] = acc;
  }
  cdf.back() = 1.0;
  CounterRng pick(seed, RngStream::Generic);
  return [cdf, components = std::move(components),
          pick](uint64_t s, std::vector<Eigen::Vector3d>& out) {
    double u = pick.uniform(s, 0);
    size_t k = 0;
    while (k + 1 < cdf.size() && u > cdf[k]) ++k;
    if (out.size() != components[k].size())
      throw std::invalid_argument("mixture_assignment: spin count mismatch");
    out = components[k];
  };
}

BlochAssignment werner_third_assignment(uint64_t seed) {
  CounterRng dir(seed, RngStream::Generic);
  return [dir](uint64_t s, std::vector<Eigen::Vector3d>& out) {
    if (out.size() != 2)
      throw std::invalid_argument("werner_third_assignment is two-spin");
    auto d = dir.sphere(s, 1);
    Eigen::Vector3d n(d[0], d[1], d[2]);
    out[0] = n;
    out[1] = -n;
  };
}

}  // namespace lhv
