#include "qboost/ising.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "qboost/random.hpp"

namespace qboost {

namespace {

bool finite(double v) { return std::isfinite(v); }

double dist2(const Position& a, const Position& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

void check_cap(std::size_t n) {
  if (n > kMaxStateQubits) {
    throw std::invalid_argument(
        "register of " + std::to_string(n) + " atoms exceeds the state-vector cap of " +
        std::to_string(kMaxStateQubits) +
        " qubits; split it with rgs::extract_clusters and evolve the clusters separately");
  }
}

}  // namespace

// --- Register / pulses ------------------------------------------------------

void Register::validate() const {
  if (!(c6 > 0.0) || !finite(c6)) throw std::invalid_argument("register: C6 must be positive");
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (!finite(positions[i].x) || !finite(positions[i].y)) {
      throw std::invalid_argument("register: non-finite coordinate for atom " + std::to_string(i));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (dist2(positions[i], positions[j]) == 0.0) {
        throw std::invalid_argument("register: atoms " + std::to_string(j) + " and " +
                                    std::to_string(i) + " coincide");
      }
    }
  }
}

Register Register::permuted(std::span<const std::size_t> order) const {
  if (order.size() != positions.size()) throw std::invalid_argument("permuted: size mismatch");
  Register out;
  out.c6 = c6;
  out.positions.reserve(order.size());
  for (auto k : order) out.positions.push_back(positions.at(k));
  return out;
}

double PulseSequence::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

void PulseSequence::validate() const {
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& s = segments[k];
    // Zero-length segments are accepted as no-ops.
    if (!(s.duration >= 0.0) || !finite(s.duration) || !finite(s.omega) || !finite(s.delta)) {
      throw std::invalid_argument("pulse segment " + std::to_string(k) +
                                  ": duration must be >= 0 and fields finite");
    }
  }
}

void to_json(Json& j, const Register& r) {
  Json pos = Json::array();
  for (const auto& p : r.positions) pos.push_back({p.x, p.y});
  j = Json{{"positions_um", pos}, {"c6_rad_um6_per_s", r.c6}};
}

void from_json(const Json& j, Register& r) {
  reject_unknown_keys(j, {"positions_um", "c6_rad_um6_per_s"}, "register");
  r = Register{};
  for (const auto& p : j.at("positions_um")) {
    if (!p.is_array() || p.size() != 2) throw std::invalid_argument("register: positions must be [x, y] pairs");
    r.positions.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  if (j.contains("c6_rad_um6_per_s")) r.c6 = j["c6_rad_um6_per_s"].get<double>();
  r.validate();
}

void to_json(Json& j, const PulseSequence& p) {
  j = Json::array();
  for (const auto& s : p.segments) {
    j.push_back({{"duration_s", s.duration}, {"omega_rad_per_s", s.omega}, {"delta_rad_per_s", s.delta}});
  }
}

void from_json(const Json& j, PulseSequence& p) {
  p = PulseSequence{};
  if (!j.is_array()) throw std::invalid_argument("pulses: expected an array of segments");
  for (const auto& s : j) {
    reject_unknown_keys(s, {"duration_s", "omega_rad_per_s", "delta_rad_per_s"}, "pulse segment");
    p.segments.push_back({s.at("duration_s").get<double>(), s.value("omega_rad_per_s", 0.0),
                          s.value("delta_rad_per_s", 0.0)});
  }
  p.validate();
}

// --- State vector -----------------------------------------------------------

StateVector::StateVector(std::vector<Amplitude> amplitudes) : amps_(std::move(amplitudes)) {
  const auto d = amps_.size();
  if (d == 0 || !std::has_single_bit(d)) throw std::invalid_argument("state vector length must be 2^N");
  n_qubits_ = static_cast<std::size_t>(std::countr_zero(d));
  check_cap(n_qubits_);
}

StateVector StateVector::ground(std::size_t n_qubits) {
  check_cap(n_qubits);
  std::vector<Amplitude> a(std::size_t{1} << n_qubits);
  a[0] = 1.0;
  return StateVector(std::move(a));
}

StateVector StateVector::basis(const Bitstring& w) {
  check_cap(w.size());
  std::vector<Amplitude> a(std::size_t{1} << w.size());
  a[w.to_index()] = 1.0;
  return StateVector(std::move(a));
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> p(amps_.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(amps_[i]);
  return p;
}

// --- Hamiltonian ------------------------------------------------------------

Eigen::MatrixXd interaction_matrix(const Register& reg) {
  reg.validate();
  const auto n = static_cast<Eigen::Index>(reg.size());
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r2 = dist2(reg.positions[i], reg.positions[j]);
      u(i, j) = u(j, i) = reg.c6 / (r2 * r2 * r2);
    }
  }
  return u;
}

std::shared_ptr<const std::vector<double>> IsingHamiltonian::interaction_energies(const Register& reg) {
  check_cap(reg.size());
  const auto u = interaction_matrix(reg);
  const std::size_t n = reg.size();
  auto e = std::make_shared<std::vector<double>>(std::size_t{1} << n, 0.0);
  // E(x) for x with highest set bit b is E(x without b) + sum_{j in x\b} U_bj.
  for (std::size_t b = 0; b < n; ++b) {
    const std::size_t hi = std::size_t{1} << b;
    for (std::size_t x = 0; x < hi; ++x) {
      double add = 0.0;
      for (std::size_t rest = x; rest; rest &= rest - 1) {
        add += u(static_cast<Eigen::Index>(b), std::countr_zero(rest));
      }
      (*e)[hi | x] = (*e)[x] + add;
    }
  }
  return e;
}

IsingHamiltonian::IsingHamiltonian(const Register& reg, double omega, double delta)
    : IsingHamiltonian(interaction_energies(reg), reg.size(), omega, delta) {}

IsingHamiltonian::IsingHamiltonian(std::shared_ptr<const std::vector<double>> interaction_energy,
                                   std::size_t n_qubits, double omega, double delta)
    : n_(n_qubits), omega_(omega), delta_(delta), eint_(std::move(interaction_energy)) {
  check_cap(n_);
  if (!eint_ || eint_->size() != (std::size_t{1} << n_)) {
    throw std::invalid_argument("hamiltonian: interaction table has the wrong size");
  }
}

double IsingHamiltonian::diagonal(std::size_t x) const {
  return (*eint_)[x] - delta_ * static_cast<double>(std::popcount(x));
}

void IsingHamiltonian::apply(std::span<const Amplitude> in, std::span<Amplitude> out, double shift) const {
  const std::size_t dim = eint_->size();
  const double* e = eint_->data();
  for (std::size_t x = 0; x < dim; ++x) {
    const double d = e[x] - delta_ * static_cast<double>(std::popcount(x)) - shift;
    out[x] = d * in[x];
  }
  const double h = 0.5 * omega_;
  if (h == 0.0) return;
  for (std::size_t b = 0; b < n_; ++b) {
    const std::size_t bit = std::size_t{1} << b;
    for (std::size_t base = 0; base < dim; base += 2 * bit) {
      Amplitude* lo = out.data() + base;
      Amplitude* hi = lo + bit;
      const Amplitude* ilo = in.data() + base;
      const Amplitude* ihi = ilo + bit;
      for (std::size_t k = 0; k < bit; ++k) {
        lo[k] += h * ihi[k];
        hi[k] += h * ilo[k];
      }
    }
  }
}

std::pair<double, double> IsingHamiltonian::spectral_bounds() const {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (std::size_t x = 0; x < eint_->size(); ++x) {
    const double d = diagonal(x);
    if (first || d < lo) lo = d;
    if (first || d > hi) hi = d;
    first = false;
  }
  // Gershgorin: each row carries n off-diagonal entries of size |Omega|/2.
  const double r = 0.5 * std::abs(omega_) * static_cast<double>(n_);
  return {lo - r, hi + r};
}

double IsingHamiltonian::expectation(const StateVector& psi) const {
  const auto& a = psi.amplitudes();
  std::vector<Amplitude> ha(a.size());
  apply(a, ha);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (std::conj(a[i]) * ha[i]).real();
  return s / std::norm(psi.norm());
}

Eigen::MatrixXcd IsingHamiltonian::dense() const {
  const auto dim = static_cast<Eigen::Index>(eint_->size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    m(x, x) = diagonal(static_cast<std::size_t>(x));
    for (std::size_t b = 0; b < n_; ++b) m(x ^ static_cast<Eigen::Index>(std::size_t{1} << b), x) = 0.5 * omega_;
  }
  return m;
}

// --- Propagation ------------------------------------------------------------

namespace {

// Tolerance on the estimated 2-norm error per unit of elapsed time relative
// to the full segment.
constexpr double kKrylovTol = 1e-11;
constexpr std::size_t kKrylovMax = 40;
constexpr std::size_t kKrylovMemoryBytes = std::size_t{512} << 20;

Amplitude dot(std::span<const Amplitude> a, std::span<const Amplitude> b) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

double norm2(std::span<const Amplitude> a) {
  double s = 0.0;
  for (const auto& v : a) s += v.real() * v.real() + v.imag() * v.imag();
  return std::sqrt(s);
}

}  // namespace

void propagate(const IsingHamiltonian& h, double t, StateVector& psi) {
  if (psi.n_qubits() != h.n_qubits()) throw std::invalid_argument("propagate: qubit count mismatch");
  if (t < 0.0 || !std::isfinite(t)) throw std::invalid_argument("propagate: time must be finite and >= 0");
  if (t == 0.0) return;

  auto& a = psi.amplitudes();
  const std::size_t dim = a.size();
  const double norm0 = psi.norm();
  const auto [emin, emax] = h.spectral_bounds();
  const double shift = 0.5 * (emin + emax);
  const double width = 0.5 * (emax - emin);

  if (width == 0.0) {
    // H is a multiple of the identity.
    const Amplitude ph = std::exp(Amplitude(0.0, -shift * t));
    for (auto& v : a) v *= ph;
    return;
  }

  std::size_t m_max = std::clamp<std::size_t>(kKrylovMemoryBytes / (sizeof(Amplitude) * dim), 8, kKrylovMax);
  m_max = std::min(m_max, dim);
  std::vector<std::vector<Amplitude>> v(m_max + 1, std::vector<Amplitude>());
  std::vector<Amplitude> w(dim);

  double remaining = t;
  double dt_guess = t;
  while (remaining > 0.0) {
    const double beta0 = norm2(a);
    if (v[0].size() != dim) v[0].resize(dim);
    for (std::size_t i = 0; i < dim; ++i) v[0][i] = a[i] / beta0;

    std::vector<double> alpha, beta;
    std::size_t m = 0;
    bool invariant = false;
    for (std::size_t k = 0; k < m_max; ++k) {
      h.apply(v[k], w, shift);
      if (k > 0) {
        for (std::size_t i = 0; i < dim; ++i) w[i] -= beta[k - 1] * v[k - 1][i];
      }
      const double al = dot(v[k], w).real();
      for (std::size_t i = 0; i < dim; ++i) w[i] -= al * v[k][i];
      // One pass of local re-orthogonalisation against the last two vectors.
      {
        const Amplitude c = dot(v[k], w);
        for (std::size_t i = 0; i < dim; ++i) w[i] -= c * v[k][i];
      }
      alpha.push_back(al);
      m = k + 1;
      const double b = norm2(w);
      if (b <= 1e-14 * width) {
        invariant = true;
        break;
      }
      beta.push_back(b);
      if (v[k + 1].size() != dim) v[k + 1].resize(dim);
      for (std::size_t i = 0; i < dim; ++i) v[k + 1][i] = w[i] / b;
    }

    Eigen::VectorXd diag(static_cast<Eigen::Index>(m));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(m > 1 ? m - 1 : 0));
    for (std::size_t k = 0; k < m; ++k) diag[static_cast<Eigen::Index>(k)] = alpha[k];
    for (std::size_t k = 0; k + 1 < m; ++k) sub[static_cast<Eigen::Index>(k)] = beta[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const Eigen::MatrixXd& s = es.eigenvectors();

    auto coeffs = [&](double dt) {
      Eigen::VectorXcd y = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(m));
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(m); ++j) {
        const Amplitude phase = std::exp(Amplitude(0.0, -lam[j] * dt)) * s(0, j);
        y += phase * s.col(j).cast<Amplitude>();
      }
      return y;
    };

    double dt = std::min(remaining, dt_guess);
    Eigen::VectorXcd y;
    for (;;) {
      y = coeffs(dt);
      if (invariant) break;
      // Residual estimate dt * beta_m * |e_m^T exp(-i dt T) e_1|.
      const double err = beta0 * dt * beta[m - 1] * std::abs(y[static_cast<Eigen::Index>(m - 1)]);
      const double allowed = kKrylovTol * norm0 * dt / t;
      if (err <= allowed) break;
      const double factor = std::clamp(0.9 * std::pow(allowed / err, 1.0 / static_cast<double>(m)), 0.05, 0.9);
      dt *= factor;
      if (dt < 1e-12 * t) throw std::runtime_error("propagate: Krylov step size collapsed");
    }

    const Amplitude ph = std::exp(Amplitude(0.0, -shift * dt)) * beta0;
    std::fill(a.begin(), a.end(), Amplitude(0.0));
    for (std::size_t k = 0; k < m; ++k) {
      const Amplitude c = ph * y[static_cast<Eigen::Index>(k)];
      for (std::size_t i = 0; i < dim; ++i) a[i] += c * v[k][i];
    }
    remaining -= dt;
    if (remaining < 1e-15 * t) remaining = 0.0;
    dt_guess = dt * 1.25;
  }

  // Unitary evolution: strip accumulated rounding in the norm.
  const double nf = norm2(a);
  for (auto& val : a) val *= norm0 / nf;
}

StateVector evolve(const Register& reg, const PulseSequence& pulses, const StateVector& initial) {
  check_cap(reg.size());
  pulses.validate();
  if (initial.n_qubits() != reg.size()) throw std::invalid_argument("evolve: state and register sizes differ");
  if (std::abs(initial.norm() - 1.0) > 1e-8) throw std::invalid_argument("evolve: initial state is not normalized");
  StateVector psi = initial;
  if (reg.size() == 0) return psi;
  auto eint = IsingHamiltonian::interaction_energies(reg);
  for (const auto& seg : pulses.segments) {
    if (seg.duration == 0.0) continue;
    IsingHamiltonian h(eint, reg.size(), seg.omega, seg.delta);
    propagate(h, seg.duration, psi);
  }
  return psi;
}

// --- Sampling ---------------------------------------------------------------

std::uint64_t sample_index(std::span<const double> probabilities, double u) {
  double total = 0.0;
  for (double p : probabilities) total += p;
  const double target = u * total;
  double acc = 0.0;
  std::uint64_t last_nonzero = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    acc += probabilities[i];
    last_nonzero = i;
    if (target < acc) return i;
  }
  return last_nonzero;
}

std::vector<Bitstring> sample(const StateVector& state, std::size_t n_shots, std::uint64_t seed) {
  const auto p = state.probabilities();
  std::vector<double> cdf(p.size());
  std::partial_sum(p.begin(), p.end(), cdf.begin());
  const double total = cdf.back();
  auto rng = make_rng(seed, "ising.sample");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Bitstring> shots;
  shots.reserve(n_shots);
  for (std::size_t s = 0; s < n_shots; ++s) {
    const double target = unif(rng) * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    auto idx = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
    // Never land on a zero-probability entry at the top end.
    while (idx > 0 && p[idx] == 0.0) --idx;
    shots.push_back(Bitstring::from_index(idx, state.n_qubits()));
  }
  return shots;
}

}  // namespace qboost
