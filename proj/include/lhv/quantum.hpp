#pragma once
// Dense few-qubit states, projectors, and measurement statistics.
// Convention: site 0 is the leftmost tensor factor and the most significant
// bit of a basis index; |0> is spin-up.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

namespace lhv {

using Vec3 = std::array<double, 3>;

struct DensityMatrix {
  Eigen::MatrixXcd m;
  int n_spins = 0;

  // Checks hermiticity, unit trace, and positive semidefiniteness.
  static DensityMatrix validated(Eigen::MatrixXcd m, double tol = 1e-9);
};

Eigen::Matrix2cd pauli(int k);  // 0 = I, 1 = x, 2 = y, 3 = z
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Projector (I + s n.sigma)/2 with s = +1 (up) or -1 (down); n must be unit.
Eigen::Matrix2cd make_projector(const Vec3& n, int outcome);

DensityMatrix product_state(const std::vector<Vec3>& bloch);
DensityMatrix noisy_state(const DensityMatrix& rho, double v);
DensityMatrix werner_state(double v);
DensityMatrix ghz_state(int n_spins, double v);
DensityMatrix w_state(double v);  // three spins

// 1/4 (I + cx (XX + YY) + cz ZZ); throws outside the physical diamond,
// reporting the offending eigenvalue.
DensityMatrix xxz_symmetric_two_spin(double cx, double cz);

// Joint outcome probability; outcomes are +1/-1 per site. Projectors are
// applied factor by factor, never as a full Kronecker product.
double qm_prob(const DensityMatrix& rho, const std::vector<Vec3>& dirs,
               const std::vector<int>& outcomes);
double qm_prob_all_up(const DensityMatrix& rho, const std::vector<Vec3>& dirs);

double single_qubit_up_prob(const DensityMatrix& one_spin, const Vec3& n);
Vec3 bloch_vector(const DensityMatrix& one_spin);

struct PptResult {
  bool entangled = false;
  double min_eigenvalue = 0.0;
};
// Peres criterion via partial transpose; exact for two qubits.
PptResult ppt_entangled(const DensityMatrix& two_spin);

// Horodecki CHSH parameter M = sum of the two largest eigenvalues of T^T T;
// M > 1 iff some CHSH inequality is violated (max CHSH value = 2 sqrt(M)).
double chsh_horodecki(const DensityMatrix& two_spin);

// Pauli correlation tensor of a state; evaluates all-up probabilities for
// many direction tuples at once (the training hot path on the quantum side).
class CorrelationTensor {
 public:
  explicit CorrelationTensor(const DensityMatrix& rho, double tol = 1e-8);
  int n_spins() const { return n_; }
  // dirs laid out (spin, xyz), one tuple.
  double prob_all_up(const double* dirs) const;
  // dirs laid out (batch, spin, xyz).
  void prob_all_up_batch(const double* dirs, int batch, double* out) const;

 private:
  int n_ = 0;
  std::vector<double> t_;  // 4^n real Pauli coefficients
};

DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<int>& keep);
DensityMatrix partial_trace_vec(const Eigen::VectorXcd& psi, int n_spins,
                                const std::vector<int>& keep);

}  // namespace lhv
