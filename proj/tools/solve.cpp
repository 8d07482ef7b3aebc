#include "solve.hpp"

#include <stdexcept>

#include "qboost/random.hpp"
#include "qboost/rgs.hpp"
#include "qboost/solvers.hpp"
#include "qboost/tebd.hpp"

namespace qboost::cli {

SolveOutcome run_solver(const QuboMatrix& q, const std::string& name, const SolverSettings& s, std::uint64_t seed,
                        std::shared_ptr<ClusterCache> cache) {
  SolveOutcome out;
  const std::size_t n = q.size();
  if (name == "brute_force") {
    auto [w, c] = brute_force_min(q);
    out.trace = SolveTrace("brute_force", seed);
    out.trace.push_scored(w, c);
  } else if (name == "uniform") {
    out.trace = uniform_solve(q, s.uniform_cycles, seed);
  } else if (name == "sa") {
    out.trace = simulated_annealing(q, s.sa, s.sa_restarts, seed);
  } else if (name == "rgs") {
    const auto& r = s.rgs;
    const auto pattern = design_pattern(n, r.p, r.spacing());
    RgsOptions o;
    o.loading = r.loading;
    o.p = r.p;
    o.cluster_cap = r.cluster_cap;
    o.relabel = r.relabel;
    o.relabel_iters = r.relabel_iters;
    o.cache = cache;
    auto run = rgs_run(q, pattern, r.pulse.build(), r.n_cycles, seed, o);
    out.trace = std::move(run.trace);
    std::size_t scored = 0;
    for (const auto& rec : out.trace.records()) scored += rec.cost.has_value();
    out.details = {{"n_qubits", n},
                   {"n_traps", pattern.n_traps()},
                   {"spacing_um", pattern.spacing},
                   {"scored_cycles", scored},
                   {"detached_atoms", run.detached_atoms}};
  } else if (name == "qaoa") {
    const auto& a = s.qaoa;
    const double spacing = spacing_for_interaction(a.u_over_omega * a.pulse.omega_max);
    const auto pattern = design_pattern(n, a.p, spacing);
    const auto reg = load_exact(pattern, n, derive_seed(seed, "qaoa.register")).atoms;
    QaoaOptions o;
    o.shape = a.pulse;
    o.step = a.step;
    out.trace = qaoa_naive(q, reg, a.n_outer, a.shots_per_iter, seed, o);
    out.details = {{"n_qubits", n}, {"spacing_um", spacing}};
  } else if (name == "tebd") {
    const double scale = q.max_abs_entry();
    const double tau = scale > 0.0 ? s.tebd.tau / scale : s.tebd.tau;
    auto r = tebd_solve(q, s.tebd.chi, tau, s.tebd.n_steps);
    out.trace = std::move(r.trace);
    out.details = {{"chi", s.tebd.chi}, {"tau", tau}};
  } else {
    throw std::invalid_argument("unknown solver \"" + name + "\"");
  }
  const auto best = out.trace.best_bitstring();
  if (!best) throw std::runtime_error(name + ": no cycle produced a bitstring of the QUBO size");
  out.best = *best;
  out.cost = *out.trace.best_cost();
  return out;
}

}  // namespace qboost::cli
