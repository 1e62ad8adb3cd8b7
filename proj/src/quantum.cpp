#include "lhv/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lhv {

namespace {
using cd = std::complex<double>;

int spins_from_dim(Eigen::Index dim) {
  int n = 0;
  Eigen::Index d = 1;
  while (d < dim) {
    d *= 2;
    ++n;
  }
  if (d != dim || n == 0)
    throw std::invalid_argument("state dimension is not a power of two");
  return n;
}

void check_unit(const Vec3& n) {
  double nrm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  if (std::abs(nrm - 1.0) > 1e-9)
    throw std::invalid_argument("direction norm " + std::to_string(nrm) +
                                " is not 1");
}

// M <- (I x..x P x..x I) M with P on `site`, touching rows only.
void apply_site_left(Eigen::MatrixXcd& m, int n_spins, int site,
                     const Eigen::Matrix2cd& p) {
  const Eigen::Index dim = m.rows();
  const Eigen::Index stride = Eigen::Index(1) << (n_spins - 1 - site);
  for (Eigen::Index base = 0; base < dim; ++base) {
    if (base & stride) continue;  // handle each (0,1) bit pair once
    Eigen::Index r0 = base, r1 = base | stride;
    for (Eigen::Index c = 0; c < dim; ++c) {
      cd v0 = m(r0, c), v1 = m(r1, c);
      m(r0, c) = p(0, 0) * v0 + p(0, 1) * v1;
      m(r1, c) = p(1, 0) * v0 + p(1, 1) * v1;
    }
  }
}
}  // namespace

DensityMatrix DensityMatrix::validated(Eigen::MatrixXcd m, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("non-square matrix");
  int n = spins_from_dim(m.rows());
  double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol)
    throw std::invalid_argument("not hermitian (deviation " +
                                std::to_string(herm) + ")");
  double tr = std::abs(m.trace() - cd(1.0));
  if (tr > tol)
    throw std::invalid_argument("trace deviates from 1 by " +
                                std::to_string(tr));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m,
                                                     Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff();
  if (lo < -tol)
    throw std::invalid_argument("negative eigenvalue " + std::to_string(lo));
  return DensityMatrix{std::move(m), n};
}

Eigen::Matrix2cd pauli(int k) {
  Eigen::Matrix2cd p;
  switch (k) {
    case 0: p << 1, 0, 0, 1; break;
    case 1: p << 0, 1, 1, 0; break;
    case 2: p << 0, cd(0, -1), cd(0, 1), 0; break;
    case 3: p << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli index out of range");
  }
  return p;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::Matrix2cd make_projector(const Vec3& n, int outcome) {
  if (outcome != 1 && outcome != -1)
    throw std::invalid_argument("outcome must be +1 or -1");
  check_unit(n);
  double s = outcome;
  Eigen::Matrix2cd p;
  p << cd(1.0 + s * n[2], 0.0), cd(s * n[0], -s * n[1]),
      cd(s * n[0], s * n[1]), cd(1.0 - s * n[2], 0.0);
  return 0.5 * p;
}

DensityMatrix product_state(const std::vector<Vec3>& bloch) {
  if (bloch.empty()) throw std::invalid_argument("product_state: no spins");
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(1, 1);
  for (const Vec3& r : bloch) {
    double nrm = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    if (nrm > 1.0 + 1e-12)
      throw std::invalid_argument("bloch vector norm " + std::to_string(nrm) +
                                  " exceeds 1");
    Eigen::Matrix2cd one;
    one << cd(1.0 + r[2], 0.0), cd(r[0], -r[1]), cd(r[0], r[1]),
        cd(1.0 - r[2], 0.0);
    rho = kron(rho, 0.5 * one);
  }
  return DensityMatrix{std::move(rho), static_cast<int>(bloch.size())};
}

DensityMatrix noisy_state(const DensityMatrix& rho, double v) {
  if (v < 0.0 || v > 1.0)
    throw std::invalid_argument("visibility outside [0, 1]");
  Eigen::Index dim = rho.m.rows();
  Eigen::MatrixXcd out =
      v * rho.m +
      (1.0 - v) / static_cast<double>(dim) *
          Eigen::MatrixXcd::Identity(dim, dim);
  return DensityMatrix{std::move(out), rho.n_spins};
}

DensityMatrix werner_state(double v) {
  Eigen::VectorXcd singlet(4);
  const double s = 1.0 / std::sqrt(2.0);
  singlet << 0, s, -s, 0;  // (|01> - |10>)/sqrt(2)
  DensityMatrix pure{singlet * singlet.adjoint(), 2};
  return noisy_state(pure, v);
}

DensityMatrix ghz_state(int n_spins, double v) {
  if (n_spins < 2) throw std::invalid_argument("ghz_state: need >= 2 spins");
  Eigen::Index dim = Eigen::Index(1) << n_spins;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  const double s = 1.0 / std::sqrt(2.0);
  psi(0) = s;
  psi(dim - 1) = s;
  return noisy_state(DensityMatrix{psi * psi.adjoint(), n_spins}, v);
}

DensityMatrix w_state(double v) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(8);
  const double s = 1.0 / std::sqrt(3.0);
  psi(0b100) = s;  // one down-spin among ups
  psi(0b010) = s;
  psi(0b001) = s;
  return noisy_state(DensityMatrix{psi * psi.adjoint(), 3}, v);
}

DensityMatrix xxz_symmetric_two_spin(double cx, double cz) {
  // Eigenvalues are (1+cz)/4 twice and (1-cz +/- 2cx)/4.
  double e0 = 0.25 * (1.0 + cz);
  double e1 = 0.25 * (1.0 - cz + 2.0 * cx);
  double e2 = 0.25 * (1.0 - cz - 2.0 * cx);
  double lo = std::min({e0, e1, e2});
  if (lo < -1e-12)
    throw std::invalid_argument(
        "xxz_symmetric_two_spin: unphysical (cx, cz), eigenvalue " +
        std::to_string(lo));
  Eigen::MatrixXcd m = 0.25 * (Eigen::MatrixXcd::Identity(4, 4) +
                               cx * (kron(pauli(1), pauli(1)) +
                                     kron(pauli(2), pauli(2))) +
                               cz * kron(pauli(3), pauli(3)));
  return DensityMatrix{std::move(m), 2};
}

double qm_prob(const DensityMatrix& rho, const std::vector<Vec3>& dirs,
               const std::vector<int>& outcomes) {
  if (static_cast<int>(dirs.size()) != rho.n_spins ||
      outcomes.size() != dirs.size())
    throw std::invalid_argument("qm_prob: direction/outcome count mismatch");
  Eigen::MatrixXcd m = rho.m;
  for (int j = 0; j < rho.n_spins; ++j)
    apply_site_left(m, rho.n_spins, j, make_projector(dirs[j], outcomes[j]));
  double p = m.trace().real();
  return p;
}

double qm_prob_all_up(const DensityMatrix& rho,
                      const std::vector<Vec3>& dirs) {
  return qm_prob(rho, dirs, std::vector<int>(dirs.size(), 1));
}

Vec3 bloch_vector(const DensityMatrix& one_spin) {
  if (one_spin.n_spins != 1)
    throw std::invalid_argument("bloch_vector: want a single spin");
  const Eigen::MatrixXcd& m = one_spin.m;
  return {2.0 * m(1, 0).real(), 2.0 * m(1, 0).imag(),
          (m(0, 0) - m(1, 1)).real()};
}

double single_qubit_up_prob(const DensityMatrix& one_spin, const Vec3& n) {
  check_unit(n);
  Vec3 r = bloch_vector(one_spin);
  return 0.5 * (1.0 + r[0] * n[0] + r[1] * n[1] + r[2] * n[2]);
}

PptResult ppt_entangled(const DensityMatrix& two_spin) {
  if (two_spin.n_spins != 2)
    throw std::invalid_argument("ppt_entangled: want two spins");
  Eigen::MatrixXcd pt(4, 4);
  for (int i1 = 0; i1 < 2; ++i1)
    for (int i2 = 0; i2 < 2; ++i2)
      for (int k1 = 0; k1 < 2; ++k1)
        for (int k2 = 0; k2 < 2; ++k2)
          pt(2 * i1 + i2, 2 * k1 + k2) = two_spin.m(2 * i1 + k2, 2 * k1 + i2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(pt,
                                                     Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff();
  return PptResult{lo < -1e-10, lo};
}

double chsh_horodecki(const DensityMatrix& two_spin) {
  if (two_spin.n_spins != 2)
    throw std::invalid_argument("chsh_horodecki: want two spins");
  Eigen::Matrix3d t;
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) {
      Eigen::MatrixXcd op = kron(pauli(a), pauli(b));
      t(a - 1, b - 1) = (two_spin.m * op).trace().real();
    }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(t.transpose() * t,
                                                    Eigen::EigenvaluesOnly);
  Eigen::Vector3d ev = es.eigenvalues();  // ascending
  return ev(1) + ev(2);
}

CorrelationTensor::CorrelationTensor(const DensityMatrix& rho, double tol)
    : n_(rho.n_spins) {
  // Contract one site at a time: after step k the array is indexed
  // [mu_0..mu_{k-1}, rows, cols] over the remaining n-k sites.
  const Eigen::Index dim = rho.m.rows();
  std::vector<cd> cur(dim * dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) cur[r * dim + c] = rho.m(r, c);

  std::vector<cd> next;
  for (int k = 0; k < n_; ++k) {
    Eigen::Index mu_count = Eigen::Index(1) << (2 * k);
    Eigen::Index rem = Eigen::Index(1) << (n_ - k);      // rows before step
    Eigen::Index rem2 = rem / 2;                         // rows after step
    next.assign(mu_count * 4 * rem2 * rem2, cd(0.0));
    for (Eigen::Index m = 0; m < mu_count; ++m)
      for (int mu = 0; mu < 4; ++mu) {
        Eigen::Matrix2cd sig = pauli(mu);
        for (Eigen::Index r = 0; r < rem2; ++r)
          for (Eigen::Index c = 0; c < rem2; ++c) {
            cd acc = 0.0;
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b) {
                // site k is the most significant remaining bit
                Eigen::Index rr = (Eigen::Index(a) << (n_ - k - 1)) | r;
                Eigen::Index cc = (Eigen::Index(b) << (n_ - k - 1)) | c;
                acc += sig(b, a) * cur[(m * rem + rr) * rem + cc];
              }
            next[((m * 4 + mu) * rem2 + r) * rem2 + c] = acc;
          }
      }
    cur.swap(next);
  }
  t_.resize(cur.size());
  for (size_t i = 0; i < cur.size(); ++i) {
    if (std::abs(cur[i].imag()) > tol)
      throw std::invalid_argument("correlation tensor has imaginary part " +
                                  std::to_string(cur[i].imag()));
    t_[i] = cur[i].real();
  }
}

double CorrelationTensor::prob_all_up(const double* dirs) const {
  double out;
  prob_all_up_batch(dirs, 1, &out);
  return out;
}

void CorrelationTensor::prob_all_up_batch(const double* dirs, int batch,
                                          double* out) const {
  // P = 2^-n sum_mu T_mu prod_j v_{mu_j}(n_j), v = (1, nx, ny, nz).
  const int n = n_;
  const size_t count = t_.size();
  const double scale = std::ldexp(1.0, -n);
  for (int bb = 0; bb < batch; ++bb) {
    const double* d = dirs + static_cast<size_t>(bb) * n * 3;
    double acc = 0.0;
    for (size_t mu = 0; mu < count; ++mu) {
      double prod = t_[mu];
      if (prod == 0.0) continue;
      size_t rest = mu;
      // mu digits are stored site 0 first in the high bits
      for (int j = n - 1; j >= 0; --j) {
        int digit = rest & 3;
        rest >>= 2;
        if (digit != 0) prod *= d[3 * j + digit - 1];
      }
      acc += prod;
    }
    out[bb] = scale * acc;
  }
}

namespace {
// Distributes the bits of `packed` to the positions in `pos` (descending
// significance order) inside an n-bit index.
Eigen::Index scatter_bits(Eigen::Index packed, const std::vector<int>& pos,
                          int n_spins) {
  Eigen::Index out = 0;
  for (size_t i = 0; i < pos.size(); ++i) {
    Eigen::Index bit = (packed >> (pos.size() - 1 - i)) & 1;
    out |= bit << (n_spins - 1 - pos[i]);
  }
  return out;
}

std::vector<int> complement_sites(const std::vector<int>& keep, int n) {
  std::vector<bool> kept(n, false);
  for (int s : keep) {
    if (s < 0 || s >= n) throw std::invalid_argument("site out of range");
    if (kept[s]) throw std::invalid_argument("duplicate site in keep list");
    kept[s] = true;
  }
  std::vector<int> env;
  for (int s = 0; s < n; ++s)
    if (!kept[s]) env.push_back(s);
  return env;
}
}  // namespace

DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep");
  std::vector<int> keep_sorted = keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());
  std::vector<int> env = complement_sites(keep_sorted, rho.n_spins);
  int nk = static_cast<int>(keep_sorted.size());
  Eigen::Index dk = Eigen::Index(1) << nk;
  Eigen::Index de = Eigen::Index(1) << env.size();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  for (Eigen::Index e = 0; e < de; ++e) {
    Eigen::Index ebits = scatter_bits(e, env, rho.n_spins);
    for (Eigen::Index a = 0; a < dk; ++a) {
      Eigen::Index abits = scatter_bits(a, keep_sorted, rho.n_spins) | ebits;
      for (Eigen::Index b = 0; b < dk; ++b) {
        Eigen::Index bbits = scatter_bits(b, keep_sorted, rho.n_spins) | ebits;
        out(a, b) += rho.m(abits, bbits);
      }
    }
  }
  return DensityMatrix{std::move(out), nk};
}

DensityMatrix partial_trace_vec(const Eigen::VectorXcd& psi, int n_spins,
                                const std::vector<int>& keep) {
  if ((Eigen::Index(1) << n_spins) != psi.size())
    throw std::invalid_argument("partial_trace_vec: size mismatch");
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep");
  std::vector<int> keep_sorted = keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());
  std::vector<int> env = complement_sites(keep_sorted, n_spins);
  int nk = static_cast<int>(keep_sorted.size());
  Eigen::Index dk = Eigen::Index(1) << nk;
  Eigen::Index de = Eigen::Index(1) << env.size();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  std::vector<Eigen::Index> kbits(dk);
  for (Eigen::Index a = 0; a < dk; ++a)
    kbits[a] = scatter_bits(a, keep_sorted, n_spins);
  for (Eigen::Index e = 0; e < de; ++e) {
    Eigen::Index ebits = scatter_bits(e, env, n_spins);
    for (Eigen::Index a = 0; a < dk; ++a) {
      cd va = psi(kbits[a] | ebits);
      if (va == cd(0.0)) continue;
      for (Eigen::Index b = 0; b < dk; ++b)
        out(a, b) += va * std::conj(psi(kbits[b] | ebits));
    }
  }
  return DensityMatrix{std::move(out), nk};
}

}  // namespace lhv
