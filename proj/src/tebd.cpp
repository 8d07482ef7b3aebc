#include "qboost/tebd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "qboost/solvers.hpp"

namespace qboost {

namespace {

constexpr double kSingularCutoff = 1e-14;

using Gate = std::array<std::array<double, 2>, 2>;  // g[s_left][s_right]

}  // namespace

Mps Mps::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Mps: at least one site required");
  Mps m;
  const double a = 1.0 / std::sqrt(2.0);
  for (std::size_t k = 0; k < n; ++k) {
    Pair p{Eigen::MatrixXd::Constant(1, 1, a), Eigen::MatrixXd::Constant(1, 1, a)};
    m.tensors_.push_back(std::move(p));
  }
  m.variables_.resize(n);
  std::iota(m.variables_.begin(), m.variables_.end(), std::size_t{0});
  return m;
}

std::size_t Mps::bond_dimension(std::size_t bond) const {
  return static_cast<std::size_t>(tensors_.at(bond)[0].cols());
}

std::size_t Mps::max_bond_dimension() const {
  std::size_t d = 1;
  for (std::size_t k = 0; k + 1 < tensors_.size(); ++k) d = std::max(d, bond_dimension(k));
  return d;
}

void Mps::apply_diagonal(std::size_t site, double g0, double g1) {
  tensors_[site][0] *= g0;
  tensors_[site][1] *= g1;
  const double nrm = std::sqrt(tensors_[site][0].squaredNorm() + tensors_[site][1].squaredNorm());
  if (!(nrm > 0.0) || !std::isfinite(nrm)) {
    throw std::runtime_error("MPS norm underflow during imaginary-time evolution; use a smaller tau");
  }
  tensors_[site][0] /= nrm;
  tensors_[site][1] /= nrm;
}

namespace {

// theta'(x, y) = g(y, x) theta(y, x), split by SVD with the singular values
// pushed right.
void gate_swap_split(std::array<Eigen::MatrixXd, 2>& left, std::array<Eigen::MatrixXd, 2>& right, const Gate& g,
                     std::size_t chi) {
  const Eigen::Index dl = left[0].rows();
  const Eigen::Index dr = right[0].cols();
  Eigen::MatrixXd theta(2 * dl, 2 * dr);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      // Original (left = y, right = x).
      theta.block(x * dl, y * dr, dl, dr) = g[y][x] * (left[y] * right[x]);
    }
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || !(s[0] > 0.0) || !std::isfinite(s[0])) {
    throw std::runtime_error("MPS norm underflow during imaginary-time evolution; use a smaller tau");
  }
  Eigen::Index keep = 0;
  while (keep < s.size() && keep < static_cast<Eigen::Index>(chi) && s[keep] > kSingularCutoff * s[0]) ++keep;
  keep = std::max<Eigen::Index>(keep, 1);
  const double nrm = s.head(keep).norm();
  const Eigen::MatrixXd u = svd.matrixU().leftCols(keep);
  const Eigen::MatrixXd sv = (s.head(keep) / nrm).asDiagonal() * svd.matrixV().leftCols(keep).transpose();
  for (int x = 0; x < 2; ++x) {
    left[x] = u.block(x * dl, 0, dl, keep);
    right[x] = sv.block(0, x * dr, keep, dr);
  }
}

}  // namespace

void Mps::left_sweep(std::size_t from) {
  for (std::size_t k = from; k > 0; --k) {
    auto& t = tensors_[k];
    const Eigen::Index dl = t[0].rows();
    const Eigen::Index dr = t[0].cols();
    Eigen::MatrixXd mt(2 * dr, dl);  // M^T with M = [A0 | A1]
    mt.topRows(dr) = t[0].transpose();
    mt.bottomRows(dr) = t[1].transpose();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(mt);
    const Eigen::Index r = std::min(2 * dr, dl);
    const Eigen::MatrixXd qthin = qr.householderQ() * Eigen::MatrixXd::Identity(2 * dr, r);
    const Eigen::MatrixXd rmat = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    t[0] = qthin.topRows(dr).transpose();
    t[1] = qthin.bottomRows(dr).transpose();
    auto& prev = tensors_[k - 1];
    prev[0] = prev[0] * rmat.transpose();
    prev[1] = prev[1] * rmat.transpose();
  }
}

void Mps::imaginary_time_step(const QuboMatrix& q, double tau, std::size_t chi) {
  const std::size_t n = size();
  if (q.size() != n) throw std::invalid_argument("imaginary_time_step: QUBO size differs from the MPS");
  if (!(tau > 0.0)) throw std::invalid_argument("imaginary_time_step: tau must be positive");
  auto single = [&](std::size_t var) {
    // (1, exp(-tau Q_vv)) rescaled so the larger entry is 1.
    const double e = -tau * q(var, var);
    return e > 0.0 ? std::array<double, 2>{std::exp(-e), 1.0} : std::array<double, 2>{1.0, std::exp(e)};
  };
  if (n == 1) {
    const auto g = single(variables_[0]);
    apply_diagonal(0, g[0], g[1]);
    return;
  }
  // Bubble-sort swap network: pass p walks the element at site 0 to site
  // n-1-p, so every pair of variables shares a bond exactly once. The first
  // pass also absorbs the single-site factors.
  for (std::size_t p = 0; p + 1 < n; ++p) {
    for (std::size_t k = 0; k + 1 + p < n; ++k) {
      const std::size_t a = variables_[k];
      const std::size_t b = variables_[k + 1];
      Gate g;
      const double e = -tau * 2.0 * q(a, b);
      for (int sa = 0; sa < 2; ++sa) {
        for (int sb = 0; sb < 2; ++sb) g[sa][sb] = (sa && sb) ? e : 0.0;
      }
      if (p == 0) {
        const double ea = -tau * q(a, a);
        const double eb = -tau * q(b, b);
        for (int sa = 0; sa < 2; ++sa) {
          for (int sb = 0; sb < 2; ++sb) g[sa][sb] += (k == 0 && sa ? ea : 0.0) + (sb ? eb : 0.0);
        }
      }
      double top = g[0][0];
      for (auto& row : g)
        for (double v : row) top = std::max(top, v);
      for (auto& row : g)
        for (double& v : row) v = std::exp(v - top);
      gate_swap_split(tensors_[k], tensors_[k + 1], g, chi);
      std::swap(variables_[k], variables_[k + 1]);
    }
    left_sweep(n - 1 - p);
  }
}

Bitstring Mps::greedy_readout() const {
  const std::size_t n = size();
  Bitstring w(n);
  Eigen::RowVectorXd env = Eigen::RowVectorXd::Ones(1);
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::RowVectorXd v0 = env * tensors_[k][0];
    const Eigen::RowVectorXd v1 = env * tensors_[k][1];
    const double p0 = v0.squaredNorm();
    const double p1 = v1.squaredNorm();
    const bool one = p1 > p0;
    w.set(variables_[k], one);
    const double nrm = std::sqrt(one ? p1 : p0);
    if (!(nrm > 0.0)) throw std::runtime_error("greedy_readout: vanishing marginal");
    env = (one ? v1 : v0) / nrm;
  }
  return w;
}

std::vector<double> Mps::to_dense() const {
  const std::size_t n = size();
  if (n > 24) throw std::invalid_argument("to_dense: too many sites");
  std::vector<double> out(std::size_t{1} << n);
  for (std::size_t cfg = 0; cfg < out.size(); ++cfg) {
    Eigen::RowVectorXd env = Eigen::RowVectorXd::Ones(1);
    std::size_t var_index = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto s = (cfg >> k) & 1u;
      env = env * tensors_[k][s];
      if (s) var_index |= std::size_t{1} << variables_[k];
    }
    out[var_index] = env(0);
  }
  return out;
}

TebdResult tebd_solve(const QuboMatrix& q, std::size_t chi, double tau, std::size_t n_steps) {
  if (q.size() == 0) throw std::invalid_argument("tebd_solve: empty QUBO");
  if (chi < 2) throw std::invalid_argument("tebd_solve: chi must be at least 2");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tebd_solve: tau must be positive");
  if (n_steps == 0) throw std::invalid_argument("tebd_solve: n_steps must be at least 1");
  auto mps = Mps::uniform(q.size());
  TebdResult r;
  r.trace = SolveTrace("tebd", 0);
  for (std::size_t step = 0; step < n_steps; ++step) {
    mps.imaginary_time_step(q, tau, chi);
    const auto w = local_descent(q, mps.greedy_readout());
    r.trace.push_scored(w, cost(q, w));
  }
  r.best = *r.trace.best_bitstring();
  return r;
}

}  // namespace qboost
