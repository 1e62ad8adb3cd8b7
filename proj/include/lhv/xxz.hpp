#pragma once
// XXZ spin chains: H = sum over bonds of (Sx Sx + Sy Sy + Delta Sz Sz),
// S = sigma/2. Total Sz is conserved, so the ground search runs per sector
// with a matrix-free Lanczos. A periodic two-site chain picks up its single
// bond twice.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace lhv {

struct SpinChainSpec {
  int length = 2;
  double delta = 1.0;
  bool periodic = false;
};

std::vector<std::pair<int, int>> chain_bonds(const SpinChainSpec& spec);

// Basis of the fixed down-spin-count sector, as sorted bitmasks.
// Bit (length-1-site) set means site is spin-down, matching the dense-state
// index convention elsewhere.
struct SzSector {
  int length = 0;
  int n_down = 0;
  std::vector<uint32_t> states;
  Eigen::Index index_of(uint32_t s) const;
};
SzSector build_sector(int length, int n_down);

void apply_xxz(const SpinChainSpec& spec, const SzSector& sector,
               const double* in, double* out);

struct LanczosResult {
  double e0 = 0.0;
  double e1 = 0.0;  // second Ritz value, +inf for one-dimensional sectors
  Eigen::VectorXd ground;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};
LanczosResult lanczos_lowest(const SpinChainSpec& spec, const SzSector& sector,
                             double tol = 1e-11, int max_iter = 500,
                             uint64_t seed = 12345);

struct GroundState {
  double energy = 0.0;
  Eigen::VectorXd psi;  // full 2^L vector (real)
  int n_down = 0;
  bool degenerate = false;
  double gap = 0.0;  // to the next level seen across all sectors
  double residual = 0.0;
};
GroundState ground_state(const SpinChainSpec& spec);

struct BondCorrelators {
  double xx = 0.0;
  double yy = 0.0;
  double zz = 0.0;
};
BondCorrelators bond_correlators(const Eigen::VectorXd& psi, int length,
                                 int site_i, int site_j);

}  // namespace lhv
