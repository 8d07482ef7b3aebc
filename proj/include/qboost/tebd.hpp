#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qboost/qubo.hpp"
#include "qboost/trace.hpp"

namespace qboost {

// Open-boundary matrix product state over N binary sites. Site k holds the
// pair of matrices A_k[s] (D_{k-1} x D_k). `variable(k)` is the QUBO variable
// currently stored at site k; swap gates permute this map.
class Mps {
 public:
  static Mps uniform(std::size_t n);

  std::size_t size() const { return tensors_.size(); }
  std::size_t bond_dimension(std::size_t bond) const;  // between site bond and bond+1
  std::size_t max_bond_dimension() const;
  std::size_t variable(std::size_t site) const { return variables_[site]; }

  // exp(-tau H_Q) for H_Q(w) = w^T Q w, long-range pairs brought together by
  // a swap network; truncates every bond to chi and renormalizes.
  void imaginary_time_step(const QuboMatrix& q, double tau, std::size_t chi);

  // Site-by-site argmax of the conditional marginals, in QUBO variable order.
  Bitstring greedy_readout() const;

  // Amplitudes indexed by QUBO bitstring (bit i = variable i). Small N only.
  std::vector<double> to_dense() const;

 private:
  using Pair = std::array<Eigen::MatrixXd, 2>;

  void apply_diagonal(std::size_t site, double g0, double g1);
  // Moves the orthogonality centre from `from` down to site 0.
  void left_sweep(std::size_t from);

  std::vector<Pair> tensors_;
  std::vector<std::size_t> variables_;
};

struct TebdResult {
  Bitstring best;
  SolveTrace trace;
};

// Imaginary-time evolution from the uniform product state. After every step
// the state is read out greedily and refined by single-bit-flip descent; the
// trace holds one record per step.
TebdResult tebd_solve(const QuboMatrix& q, std::size_t chi, double tau, std::size_t n_steps);

}  // namespace qboost
