#include "lhv/xxz.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lhv/rng.hpp"

namespace lhv {

std::vector<std::pair<int, int>> chain_bonds(const SpinChainSpec& spec) {
  if (spec.length < 2 || spec.length > 24)
    throw std::invalid_argument("chain length out of range");
  std::vector<std::pair<int, int>> bonds;
  for (int i = 0; i + 1 < spec.length; ++i) bonds.emplace_back(i, i + 1);
  if (spec.periodic) bonds.emplace_back(spec.length - 1, 0);
  return bonds;
}

Eigen::Index SzSector::index_of(uint32_t s) const {
  auto it = std::lower_bound(states.begin(), states.end(), s);
  if (it == states.end() || *it != s)
    throw std::logic_error("state outside sector");
  return it - states.begin();
}

SzSector build_sector(int length, int n_down) {
  if (length < 1 || length > 24 || n_down < 0 || n_down > length)
    throw std::invalid_argument("bad sector parameters");
  SzSector sec{length, n_down, {}};
  for (uint32_t s = 0; s < (1u << length); ++s)
    if (std::popcount(s) == n_down) sec.states.push_back(s);
  return sec;
}

void apply_xxz(const SpinChainSpec& spec, const SzSector& sector,
               const double* in, double* out) {
  const auto bonds = chain_bonds(spec);
  const int L = spec.length;
  const double delta = spec.delta;
  const Eigen::Index dim = sector.states.size();
  std::fill(out, out + dim, 0.0);
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    const uint32_t s = sector.states[idx];
    const double amp = in[idx];
    if (amp == 0.0) continue;
    double diag = 0.0;
    for (auto [i, j] : bonds) {
      uint32_t mi = 1u << (L - 1 - i), mj = 1u << (L - 1 - j);
      bool bi = s & mi, bj = s & mj;
      if (bi == bj) {
        diag += 0.25 * delta;
      } else {
        diag -= 0.25 * delta;
        out[sector.index_of(s ^ (mi | mj))] += 0.5 * amp;
      }
    }
    out[idx] += diag * amp;
  }
}

namespace {

// Dense fallback for tiny sectors.
LanczosResult dense_lowest(const SpinChainSpec& spec, const SzSector& sector) {
  const Eigen::Index dim = sector.states.size();
  Eigen::MatrixXd h(dim, dim);
  std::vector<double> e(dim, 0.0), col(dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    e.assign(dim, 0.0);
    e[c] = 1.0;
    apply_xxz(spec, sector, e.data(), col.data());
    for (Eigen::Index r = 0; r < dim; ++r) h(r, c) = col[r];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  LanczosResult r;
  r.e0 = es.eigenvalues()(0);
  r.e1 = dim > 1 ? es.eigenvalues()(1)
                 : std::numeric_limits<double>::infinity();
  r.ground = es.eigenvectors().col(0);
  r.iterations = 0;
  r.residual = 0.0;
  r.converged = true;
  return r;
}

}  // namespace

LanczosResult lanczos_lowest(const SpinChainSpec& spec, const SzSector& sector,
                             double tol, int max_iter, uint64_t seed) {
  const Eigen::Index dim = sector.states.size();
  if (dim == 0) throw std::invalid_argument("empty sector");
  if (dim <= 64) return dense_lowest(spec, sector);

  CounterRng rng(seed, RngStream::Lanczos);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    v(i) = rng.normal2(static_cast<uint64_t>(i), 0)[0];
  v.normalize();

  const int m_cap = std::min<Eigen::Index>(max_iter, dim);
  Eigen::MatrixXd basis(dim, m_cap);
  std::vector<double> alpha, beta;  // beta[k] couples k and k+1
  Eigen::VectorXd w(dim), prev = Eigen::VectorXd::Zero(dim);
  basis.col(0) = v;

  double scale = 1.0;
  LanczosResult res;
  Eigen::VectorXd ritz_in_krylov;
  int m = 0;
  for (int k = 0; k < m_cap; ++k) {
    apply_xxz(spec, sector, basis.col(k).data(), w.data());
    double a = basis.col(k).dot(w);
    alpha.push_back(a);
    w -= a * basis.col(k);
    if (k > 0) w -= beta[k - 1] * prev;
    // Full reorthogonalization, twice for safety.
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXd proj =
          basis.leftCols(k + 1).transpose() * w;
      w -= basis.leftCols(k + 1) * proj;
    }
    m = k + 1;

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    scale = std::max({scale, std::abs(es.eigenvalues()(0)),
                      std::abs(es.eigenvalues()(m - 1))});
    double b = w.norm();
    double bound = b * std::abs(es.eigenvectors()(m - 1, 0));
    res.e0 = es.eigenvalues()(0);
    res.e1 = m > 1 ? es.eigenvalues()(1)
                   : std::numeric_limits<double>::infinity();
    ritz_in_krylov = es.eigenvectors().col(0);
    res.iterations = m;
    if (bound <= tol * scale || b <= 1e-13 * scale) {
      res.converged = true;
      break;
    }
    if (k + 1 < m_cap) {
      prev = basis.col(k);
      basis.col(k + 1) = w / b;
      beta.push_back(b);
    }
  }

  res.ground = basis.leftCols(m) * ritz_in_krylov;
  res.ground.normalize();
  apply_xxz(spec, sector, res.ground.data(), w.data());
  res.residual = (w - res.e0 * res.ground).norm() / std::max(1.0, scale);
  if (!res.converged && res.residual <= 1e-9) res.converged = true;
  return res;
}

GroundState ground_state(const SpinChainSpec& spec) {
  const int L = spec.length;
  const double deg_tol = 1e-8;

  std::vector<LanczosResult> per_sector(L + 1);
  for (int nd = 0; nd <= L; ++nd) {
    SzSector sec = build_sector(L, nd);
    per_sector[nd] = lanczos_lowest(spec, sec);
    if (!per_sector[nd].converged)
      throw std::runtime_error("ground_state: Lanczos did not converge in "
                               "sector " + std::to_string(nd));
  }
  // Winner is the smallest sector minimum; ties go to the sector closest to
  // total Sz = 0.
  int best_sector = 0;
  for (int nd = 1; nd <= L; ++nd) {
    double e = per_sector[nd].e0, be = per_sector[best_sector].e0;
    if (e < be - deg_tol ||
        (std::abs(e - be) <= deg_tol &&
         std::abs(2 * nd - L) < std::abs(2 * best_sector - L)))
      best_sector = nd;
  }
  double second = std::numeric_limits<double>::infinity();
  for (int nd = 0; nd <= L; ++nd) {
    second = std::min(second, per_sector[nd].e1);
    if (nd != best_sector) second = std::min(second, per_sector[nd].e0);
  }

  const LanczosResult& win = per_sector[best_sector];
  GroundState gs;
  gs.energy = win.e0;
  gs.n_down = best_sector;
  gs.gap = second - win.e0;
  gs.degenerate = gs.gap <= deg_tol * std::max(1.0, std::abs(win.e0));
  gs.residual = win.residual;
  gs.psi = Eigen::VectorXd::Zero(Eigen::Index(1) << L);
  SzSector sec = build_sector(L, best_sector);
  for (Eigen::Index i = 0; i < win.ground.size(); ++i)
    gs.psi(sec.states[i]) = win.ground(i);
  return gs;
}

BondCorrelators bond_correlators(const Eigen::VectorXd& psi, int length,
                                 int site_i, int site_j) {
  if (psi.size() != (Eigen::Index(1) << length))
    throw std::invalid_argument("bond_correlators: size mismatch");
  if (site_i == site_j) throw std::invalid_argument("need distinct sites");
  const uint32_t mi = 1u << (length - 1 - site_i);
  const uint32_t mj = 1u << (length - 1 - site_j);
  BondCorrelators c;
  for (Eigen::Index idx = 0; idx < psi.size(); ++idx) {
    const uint32_t s = static_cast<uint32_t>(idx);
    double a = psi(idx);
    if (a == 0.0) continue;
    bool equal = ((s & mi) != 0) == ((s & mj) != 0);
    c.zz += a * a * (equal ? 1.0 : -1.0);
    double flip = a * psi(s ^ (mi | mj));
    c.xx += flip;
    c.yy += flip * (equal ? -1.0 : 1.0);
  }
  return c;
}

}  // namespace lhv
