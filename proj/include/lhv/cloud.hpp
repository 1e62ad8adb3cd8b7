#pragma once
// Hidden-state cloud: N_h samples of per-spin coefficient vectors, stored in
// the working precision. Layout is row-major (sample, spin, component)
// everywhere, including the binary checkpoint.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lhv/rng.hpp"

namespace lhv {

enum class Precision : uint8_t { F32 = 0, F64 = 1 };

const char* precision_name(Precision p);
Precision precision_from_name(const std::string& name);

struct HiddenStateCloud {
  Precision precision = Precision::F32;
  int degree = 1;
  int spins = 1;
  int dim = 3;  // (degree+1)(degree+2)/2
  uint64_t samples = 0;
  std::vector<float> f32;
  std::vector<double> f64;

  uint64_t size() const {
    return samples * static_cast<uint64_t>(spins) * static_cast<uint64_t>(dim);
  }
  uint64_t offset(uint64_t sample, int spin) const {
    return (sample * static_cast<uint64_t>(spins) + static_cast<uint64_t>(spin)) *
           static_cast<uint64_t>(dim);
  }
  void allocate();
  bool finite() const;
  double value(uint64_t sample, int spin, int comp) const;
  void set_value(uint64_t sample, int spin, int comp, double v);
  HiddenStateCloud to_precision(Precision p) const;
};

// I.i.d. Gaussian entries with standard deviation `scale`.
HiddenStateCloud init_cloud(int degree, int spins, uint64_t samples,
                            Precision prec, uint64_t seed, double scale);

// Binary checkpoint (header documented in the format constants in cloud.cpp).
void save_cloud(const HiddenStateCloud& c, const std::string& path);
HiddenStateCloud load_cloud(const std::string& path);

// Structured-text export of the same fields, nested arrays; intended for
// debugging and interchange, not bulk storage. `max_samples` truncates the
// payload (0 = all).
std::string cloud_to_json(const HiddenStateCloud& c, uint64_t max_samples = 0);

// Exact single-spin hidden-direction density for a qubit with Bloch vector r:
//   p(lam | r) = (r.lam) H(r.lam) / pi + (1 - |r|) / (4 pi).
// Non-negative and normalized over the sphere for |r| <= 1.
double exact_single_spin_density(const Eigen::Vector3d& r,
                                 const Eigen::Vector3d& lam);

// Rejection sampler for the density above (uniform proposal, constant
// envelope). `a` / `q` address the RNG counter: callers give each logical
// draw a distinct (a, q) pair; q is a coarse slot, attempts fan out below it.
Eigen::Vector3d sample_exact_single_spin(const Eigen::Vector3d& r,
                                         const CounterRng& rng, uint64_t a,
                                         uint64_t q = 0);

// Per-sample Bloch vectors for a separable construction: fills one vector of
// length `spins` for hidden sample `s`.
using BlochAssignment =
    std::function<void(uint64_t s, std::vector<Eigen::Vector3d>&)>;

// Degree-1 cloud realizing a separable state exactly (in distribution): each
// spin's hidden direction is drawn from its exact single-spin density and
// embedded as a degree-1 coefficient vector of norm `scale`. Large `scale`
// approximates the hard rule when evaluated with the soft rule.
HiddenStateCloud separable_cloud(int spins, uint64_t samples, uint64_t seed,
                                 double scale, const BlochAssignment& assign,
                                 Precision prec = Precision::F64);

// Fixed product state: one Bloch vector per spin.
BlochAssignment product_assignment(std::vector<Eigen::Vector3d> blochs);

// Finite mixture of product states; weights need not be normalized.
BlochAssignment mixture_assignment(
    std::vector<double> weights,
    std::vector<std::vector<Eigen::Vector3d>> components, uint64_t seed);

// Isotropic decomposition of the two-qubit Werner state at v = 1/3:
// draw n uniformly, spins get Bloch vectors (+n, -n).
BlochAssignment werner_third_assignment(uint64_t seed);

}  // namespace lhv
