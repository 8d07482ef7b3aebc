#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qboost/io.hpp"
#include "qboost/learners.hpp"

namespace qboost {

// Binary vector w in {0,1}^N. Ordering is lexicographic on (w_0, w_1, ...),
// which is also the order of the printed form "w_0 w_1 ... w_{N-1}".
class Bitstring {
 public:
  Bitstring() = default;
  explicit Bitstring(std::size_t n) : bits_(n, 0) {}
  explicit Bitstring(std::vector<std::uint8_t> bits);

  static Bitstring from_string(std::string_view text);
  // Bit i of `index` becomes entry i.
  static Bitstring from_index(std::uint64_t index, std::size_t n);

  std::size_t size() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }
  std::size_t count() const;
  std::uint64_t to_index() const;
  std::string to_string() const;
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const Bitstring&, const Bitstring&) = default;
  friend auto operator<=>(const Bitstring& a, const Bitstring& b) { return a.bits_ <=> b.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
};

// Dense symmetric QUBO matrix. cost(w) = sum_ij Q_ij w_i w_j.
class QuboMatrix {
 public:
  QuboMatrix() = default;
  QuboMatrix(std::size_t n, double lambda = 0.0, std::size_t n_samples = 0);

  std::size_t size() const { return n_; }
  double lambda() const { return lambda_; }
  std::size_t n_samples() const { return n_samples_; }

  double operator()(std::size_t i, std::size_t j) const { return q_[i * n_ + j]; }
  // Sets Q_ij and Q_ji.
  void set(std::size_t i, std::size_t j, double v);
  std::span<const double> row(std::size_t i) const { return std::span(q_).subspan(i * n_, n_); }

  double max_abs_entry() const;
  double max_abs_off_diagonal() const;
  bool all_off_diagonal_nonnegative() const;

 private:
  std::size_t n_ = 0;
  double lambda_ = 0.0;
  std::size_t n_samples_ = 0;
  std::vector<double> q_;
};

// Expansion of the squared-loss ensemble cost with binary weights,
//   H(w) = sum_s ((1/N) sum_i w_i h_i(x_s) - y_s)^2 + lambda |w|_0,
// scaled by N^2 with the constant N^2 S dropped, so that
//   Q_ij = Corr(h_i, h_j)                         (i != j)
//   Q_ii = S + N^2 lambda - 2 N Corr(h_i, y)
// and w^T Q w = N^2 (H(w) - S) for every w.
QuboMatrix build_qubo(const PredictionMatrix& h, std::span<const int> labels, double lambda);

double cost(const QuboMatrix& q, const Bitstring& w);

// Exhaustive search, N <= kBruteForceCap. Ties resolve to the
// lexicographically smallest bitstring.
inline constexpr std::size_t kBruteForceCap = 24;
std::pair<Bitstring, double> brute_force_min(const QuboMatrix& q);

// Gray-code walk over all 2^N bitstrings, calling visit(index, cost) for each
// (index bit i = w_i). Costs are updated incrementally, so they carry O(N)
// rounding relative to cost().
void for_each_cost(const QuboMatrix& q, std::size_t cap,
                   const std::function<void(std::uint64_t, double)>& visit);

double gap(const QuboMatrix& q, const Bitstring& w, const Bitstring& reference);
double gap_from_costs(double cost, double reference_cost);

// Random QUBO with the sign structure of positively correlated ensembles:
// couplings uniform in [0, 1], diagonal uniform in [-0.6, -0.4] x N / 2.
QuboMatrix random_positive_qubo(std::size_t n, std::uint64_t seed);

void to_json(Json& j, const QuboMatrix& q);
void from_json(const Json& j, QuboMatrix& q);

}  // namespace qboost
