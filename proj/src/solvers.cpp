#include "qboost/solvers.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qboost/random.hpp"

namespace qboost {

SolveTrace uniform_solve(const QuboMatrix& q, std::size_t n_cycles, std::uint64_t seed) {
  if (n_cycles == 0) throw std::invalid_argument("uniform_solve: n_cycles must be at least 1");
  auto rng = make_rng(seed, "uniform");
  std::bernoulli_distribution coin(0.5);
  SolveTrace t("uniform", seed);
  for (std::size_t c = 0; c < n_cycles; ++c) {
    Bitstring w(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) w.set(i, coin(rng));
    const double v = cost(q, w);
    t.push_scored(w, v);
  }
  return t;
}

// --- Simulated annealing ----------------------------------------------------

void SaSchedule::validate() const {
  if (n_sweeps == 0) throw std::invalid_argument("SA schedule: n_sweeps must be at least 1");
  if (!(beta_initial > 0.0) || !(beta_final > beta_initial) || !std::isfinite(beta_final)) {
    throw std::invalid_argument("SA schedule: need 0 < beta_initial < beta_final");
  }
  if (schedule != "geometric") throw std::invalid_argument("SA schedule: only 'geometric' is supported");
}

double SaSchedule::beta(std::size_t sweep) const {
  if (n_sweeps == 1) return beta_final;
  const double f = static_cast<double>(sweep) / static_cast<double>(n_sweeps - 1);
  return beta_initial * std::pow(beta_final / beta_initial, f);
}

void to_json(Json& j, const SaSchedule& s) {
  j = Json{{"n_sweeps", s.n_sweeps},
           {"beta_initial", s.beta_initial},
           {"beta_final", s.beta_final},
           {"schedule", s.schedule},
           {"start_all_ones", s.start_all_ones}};
}

void from_json(const Json& j, SaSchedule& s) {
  reject_unknown_keys(j, {"n_sweeps", "beta_initial", "beta_final", "schedule", "start_all_ones"}, "SA schedule");
  s = SaSchedule{};
  s.n_sweeps = j.value("n_sweeps", s.n_sweeps);
  s.beta_initial = j.value("beta_initial", s.beta_initial);
  s.beta_final = j.value("beta_final", s.beta_final);
  s.schedule = j.value("schedule", s.schedule);
  s.start_all_ones = j.value("start_all_ones", s.start_all_ones);
  s.validate();
}

SolveTrace simulated_annealing(const QuboMatrix& q, const SaSchedule& schedule, std::size_t n_restarts,
                               std::uint64_t seed) {
  schedule.validate();
  if (n_restarts == 0) throw std::invalid_argument("simulated_annealing: n_restarts must be at least 1");
  const std::size_t n = q.size();
  const double scale = q.max_abs_entry() > 0.0 ? q.max_abs_entry() : 1.0;
  std::vector<double> betas(schedule.n_sweeps);
  for (std::size_t s = 0; s < betas.size(); ++s) betas[s] = schedule.beta(s) / scale;

  SolveTrace t("sa", seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t r = 0; r < n_restarts; ++r) {
    auto rng = make_rng(seed, "sa.restart", r);
    std::vector<std::uint8_t> w(n, 1);
    if (!schedule.start_all_ones) {
      std::bernoulli_distribution coin(0.5);
      for (auto& b : w) b = coin(rng) ? 1 : 0;
    }
    // field[i] = sum_{j != i} Q_ij w_j
    std::vector<double> field(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && w[j]) field[i] += q(i, j);
      }
    }
    double c = cost(q, Bitstring(w));
    double best = c;
    std::vector<std::uint8_t> best_w = w;
    for (const double beta : betas) {
      for (std::size_t i = 0; i < n; ++i) {
        const double sign = w[i] ? -1.0 : 1.0;
        const double delta = sign * (q(i, i) + 2.0 * field[i]);
        if (delta <= 0.0 || unif(rng) < std::exp(-beta * delta)) {
          w[i] ^= 1;
          c += delta;
          const auto row = q.row(i);
          for (std::size_t j = 0; j < n; ++j) field[j] += sign * row[j];
          field[i] -= sign * row[i];
          if (c < best) {
            best = c;
            best_w = w;
          }
        }
      }
    }
    Bitstring bw(best_w);
    t.push_scored(bw, cost(q, bw));
  }
  return t;
}

Bitstring local_descent(const QuboMatrix& q, Bitstring w) {
  const std::size_t n = q.size();
  if (w.size() != n) throw std::invalid_argument("local_descent: size mismatch");
  std::vector<double> field(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && w[j]) field[i] += q(i, j);
    }
  }
  for (;;) {
    double best = 0.0;
    std::size_t arg = n;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (w[i] ? -1.0 : 1.0) * (q(i, i) + 2.0 * field[i]);
      // Require a clear decrease so rounding cannot cycle.
      if (d < best - 1e-12 * (1.0 + std::abs(q(i, i)))) {
        best = d;
        arg = i;
      }
    }
    if (arg == n) return w;
    const double sign = w[arg] ? -1.0 : 1.0;
    w.flip(arg);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != arg) field[j] += sign * q(j, arg);
    }
  }
}

// --- Naive analog QAOA ------------------------------------------------------

SolveTrace qaoa_naive(const QuboMatrix& q, const Register& atoms, std::size_t n_outer, std::size_t shots_per_iter,
                      std::uint64_t seed, const QaoaOptions& options) {
  if (atoms.size() != q.size()) throw std::invalid_argument("qaoa_naive: register and QUBO sizes differ");
  if (atoms.size() > kMaxStateQubits) {
    throw std::invalid_argument("qaoa_naive: " + std::to_string(atoms.size()) + " atoms exceed the state-vector cap of " +
                                std::to_string(kMaxStateQubits));
  }
  if (n_outer == 0 || shots_per_iter == 0) throw std::invalid_argument("qaoa_naive: empty budget");
  const auto base = options.shape.build();

  std::vector<std::size_t> sigma(q.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = i;
  if (options.relabel) {
    const std::size_t it = options.relabel_iters ? options.relabel_iters : default_relabel_iters(q.size());
    sigma = relabel(q, atoms, it, derive_seed(seed, "qaoa.relabel")).sigma;
  }

  auto rng = make_rng(seed, "qaoa.search");
  std::normal_distribution<double> gauss(0.0, options.step);
  std::array<double, 3> incumbent{};
  for (std::size_t k = 0; k < 3; ++k) incumbent[k] = base.segments[k].duration;
  double incumbent_score = std::numeric_limits<double>::infinity();

  SolveTrace t("qaoa", seed);
  for (std::size_t it = 0; it < n_outer; ++it) {
    auto trial = incumbent;
    if (it > 0) trial[(it - 1) % 3] *= std::exp(gauss(rng));
    PulseSequence pulses = base;
    for (std::size_t k = 0; k < 3; ++k) pulses.segments[k].duration = trial[k];
    const auto psi = evolve(atoms, pulses, StateVector::ground(atoms.size()));
    const auto shots = sample(psi, shots_per_iter, derive_seed(seed, "qaoa.shots", it));
    double mean = 0.0;
    for (const auto& s : shots) {
      const auto w = apply_relabel(s, sigma);
      const double c = cost(q, w);
      mean += c;
      t.push_scored(w, c);
    }
    mean /= static_cast<double>(shots.size());
    if (mean < incumbent_score) {
      incumbent_score = mean;
      incumbent = trial;
    }
  }
  return t;
}

std::pair<Bitstring, double> reference_solution(const QuboMatrix& q, std::uint64_t seed) {
  if (q.size() <= kBruteForceCap) return brute_force_min(q);
  const auto t = simulated_annealing(q, SaSchedule{}, 200, derive_seed(seed, "reference"));
  return {*t.best_bitstring(), *t.best_cost()};
}

}  // namespace qboost
