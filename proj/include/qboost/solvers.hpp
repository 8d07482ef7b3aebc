#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "qboost/ising.hpp"
#include "qboost/qubo.hpp"
#include "qboost/rgs.hpp"
#include "qboost/trace.hpp"

namespace qboost {

SolveTrace uniform_solve(const QuboMatrix& q, std::size_t n_cycles, std::uint64_t seed);

// Inverse temperatures are in units of 1 / max|Q_ij|, so one schedule serves
// QUBOs of any scale.
struct SaSchedule {
  std::size_t n_sweeps = 1000;
  double beta_initial = 0.1;
  double beta_final = 10.0;
  std::string schedule = "geometric";
  bool start_all_ones = false;  // otherwise a uniformly random start

  void validate() const;
  double beta(std::size_t sweep) const;  // unscaled, sweep in [0, n_sweeps)
};

void to_json(Json& j, const SaSchedule& s);
void from_json(const Json& j, SaSchedule& s);

// Single-bit-flip Metropolis; one trace record (the best state visited) per
// restart.
SolveTrace simulated_annealing(const QuboMatrix& q, const SaSchedule& schedule, std::size_t n_restarts,
                               std::uint64_t seed);

struct QaoaOptions {
  PulseShape shape;           // starting durations and field values
  double step = 0.5;          // log-scale perturbation width
  bool relabel = true;        // one-off relabeling of the fixed register
  std::size_t relabel_iters = 0;  // 0 selects 10 N
};

// Derivative-free tuning of the three segment durations on a fixed register.
// Iteration k evolves, draws shots_per_iter measurements and scores their
// mean cost; a perturbed duration is kept only if it lowers that mean.
SolveTrace qaoa_naive(const QuboMatrix& q, const Register& atoms, std::size_t n_outer,
                      std::size_t shots_per_iter, std::uint64_t seed, const QaoaOptions& options = {});

// Brute force up to kBruteForceCap, else the best of 200 SA restarts of 1000
// sweeps.
std::pair<Bitstring, double> reference_solution(const QuboMatrix& q, std::uint64_t seed = 0);

// Greedy single-bit-flip descent to a local minimum of cost(q, .).
Bitstring local_descent(const QuboMatrix& q, Bitstring w);

}  // namespace qboost
