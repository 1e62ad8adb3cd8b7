#pragma once
// One optimization step's compute: feature table, forward sigmoid products,
// two-outcome KL loss, analytic gradient. Parallel over hidden samples with
// fixed-shape reductions, so every number is bitwise independent of the
// worker count.
//
// Layouts (all row-major, flat):
//   directions  [batch][spins][3]   (double, unit rows)
//   features    [spins][dim][batch]
//   cloud/grad  [sample][spin][component]
//   q           [sample][spin][batch]
//   w           [sample][batch]
//   p, g, KL    [batch]

#include <cstdint>
#include <vector>

#include "lhv/sh_basis.hpp"

namespace lhv {

template <typename T>
class StepKernel {
 public:
  StepKernel(uint64_t n_h, int spins, int dim, int batch);

  // Evaluates the harmonics at each direction in the working precision.
  void set_directions(const ShBasis& basis, const double* dirs);

  // Fills q, w and the per-element probabilities p.
  void forward(const T* cloud);

  // Batch-mean KL against quantum probabilities (double, clamped here);
  // fills the per-element derivative coefficients g = (p-pq)/(p(1-p)).
  T loss_and_coeff(const double* pq);

  // Writes dLoss/dCloud (overwrites; same shape as the cloud data).
  void backward(T* grad) const;

  uint64_t hidden_samples() const { return n_h_; }
  int spins() const { return spins_; }
  int dim() const { return dim_; }
  int batch() const { return batch_; }
  const T* p() const { return p_.data(); }
  const T* g() const { return g_.data(); }
  const T* features() const { return feat_.data(); }

 private:
  uint64_t n_h_;
  int spins_, dim_, batch_;
  T clamp_lo_, clamp_hi_;
  std::vector<T> feat_, q_, w_, p_, g_, lbuf_, part_;
};

extern template class StepKernel<float>;
extern template class StepKernel<double>;

}  // namespace lhv
