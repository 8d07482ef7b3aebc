#include "qboost/qubo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qboost/random.hpp"

namespace qboost {

Bitstring::Bitstring(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_)
    if (b > 1) throw std::invalid_argument("bitstring entries must be 0 or 1");
}

Bitstring Bitstring::from_string(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw std::invalid_argument("bitstring text must contain only 0/1");
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return Bitstring(std::move(bits));
}

Bitstring Bitstring::from_index(std::uint64_t index, std::size_t n) {
  Bitstring b(n);
  for (std::size_t i = 0; i < n; ++i) b.bits_[i] = static_cast<std::uint8_t>((index >> i) & 1U);
  return b;
}

std::size_t Bitstring::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

std::uint64_t Bitstring::to_index() const {
  if (bits_.size() > 64) throw std::invalid_argument("bitstring too long for an index");
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) idx |= static_cast<std::uint64_t>(bits_[i]) << i;
  return idx;
}

std::string Bitstring::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
  return s;
}

QuboMatrix::QuboMatrix(std::size_t n, double lambda, std::size_t n_samples)
    : n_(n), lambda_(lambda), n_samples_(n_samples), q_(n * n, 0.0) {}

void QuboMatrix::set(std::size_t i, std::size_t j, double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("QUBO entries must be finite");
  q_[i * n_ + j] = v;
  q_[j * n_ + i] = v;
}

double QuboMatrix::max_abs_entry() const {
  double m = 0.0;
  for (double v : q_) m = std::max(m, std::abs(v));
  return m;
}

double QuboMatrix::max_abs_off_diagonal() const {
  double m = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (i != j) m = std::max(m, std::abs(q_[i * n_ + j]));
  return m;
}

bool QuboMatrix::all_off_diagonal_nonnegative() const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (q_[i * n_ + j] < 0.0) return false;
  return true;
}

QuboMatrix build_qubo(const PredictionMatrix& h, std::span<const int> labels, double lambda) {
  const std::size_t n = h.n_learners(), s = h.n_samples();
  if (labels.size() != s) {
    throw std::invalid_argument("build_qubo: " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(s) + " samples");
  }
  if (n == 0) throw std::invalid_argument("build_qubo: no learners");
  if (!std::isfinite(lambda)) throw std::invalid_argument("build_qubo: lambda must be finite");
  QuboMatrix q(n, lambda, s);
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto hi = h.row(i);
    long corr_y = 0;
    for (std::size_t k = 0; k < s; ++k) corr_y += hi[k] * labels[k];
    q.set(i, i, static_cast<double>(s) + nd * nd * lambda - 2.0 * nd * static_cast<double>(corr_y));
    for (std::size_t j = i + 1; j < n; ++j) {
      auto hj = h.row(j);
      long corr = 0;
      for (std::size_t k = 0; k < s; ++k) corr += hi[k] * hj[k];
      q.set(i, j, static_cast<double>(corr));
    }
  }
  return q;
}

double cost(const QuboMatrix& q, const Bitstring& w) {
  if (w.size() != q.size()) {
    throw std::invalid_argument("cost: bitstring length " + std::to_string(w.size()) +
                                " does not match QUBO size " + std::to_string(q.size()));
  }
  std::vector<std::size_t> on;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i]) on.push_back(i);
  double total = 0.0;
  for (std::size_t a = 0; a < on.size(); ++a) {
    total += q(on[a], on[a]);
    for (std::size_t b = a + 1; b < on.size(); ++b) total += 2.0 * q(on[a], on[b]);
  }
  return total;
}

void for_each_cost(const QuboMatrix& q, std::size_t cap,
                   const std::function<void(std::uint64_t, double)>& visit) {
  const std::size_t n = q.size();
  if (n > cap || n > 62) {
    throw std::invalid_argument("exhaustive enumeration capped at N=" + std::to_string(cap) +
                                " (got N=" + std::to_string(n) +
                                "); use the simulated-annealing reference instead");
  }
  // field[k] = sum_{j != k} Q_kj w_j
  std::vector<double> field(n, 0.0);
  std::vector<std::uint8_t> w(n, 0);
  double c = 0.0;
  std::uint64_t idx = 0;
  visit(0, 0.0);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t g = 1; g < total; ++g) {
    const auto k = static_cast<std::size_t>(std::countr_zero(g));
    const double sign = w[k] ? -1.0 : 1.0;
    c += sign * (q(k, k) + 2.0 * field[k]);
    w[k] ^= 1;
    idx ^= std::uint64_t{1} << k;
    const double* row = q.row(k).data();
    double* f = field.data();
    for (std::size_t j = 0; j < n; ++j) f[j] += sign * row[j];
    f[k] -= sign * row[k];
    visit(idx, c);
  }
}

std::pair<Bitstring, double> brute_force_min(const QuboMatrix& q) {
  const std::size_t n = q.size();
  if (n > kBruteForceCap) {
    throw std::invalid_argument("brute_force_min: N=" + std::to_string(n) + " exceeds the cap of " +
                                std::to_string(kBruteForceCap) +
                                "; use the simulated-annealing reference instead");
  }
  const double tol = 1e-9 * (1.0 + q.max_abs_entry() * static_cast<double>(n * n));
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::uint64_t, double>> near;
  for_each_cost(q, kBruteForceCap, [&](std::uint64_t idx, double c) {
    if (c < best) {
      best = c;
      std::erase_if(near, [&](const auto& e) { return e.second > best + tol; });
    }
    if (c <= best + tol) near.emplace_back(idx, c);
  });

  // Re-evaluate the near-optimal candidates exactly.
  Bitstring arg;
  double arg_cost = std::numeric_limits<double>::infinity();
  for (const auto& [idx, _] : near) {
    Bitstring b = Bitstring::from_index(idx, n);
    double c = cost(q, b);
    double eq_tol = 1e-12 * std::max(1.0, std::abs(c));
    if (c < arg_cost - eq_tol || (std::abs(c - arg_cost) <= eq_tol && b < arg)) {
      if (c < arg_cost) arg_cost = c;
      arg = std::move(b);
    }
  }
  arg_cost = cost(q, arg);
  return {arg, arg_cost};
}

double gap_from_costs(double c, double reference_cost) {
  if (reference_cost == 0.0) {
    throw std::invalid_argument("gap: reference cost is zero, relative gap undefined");
  }
  return std::abs((c - reference_cost) / reference_cost);
}

double gap(const QuboMatrix& q, const Bitstring& w, const Bitstring& reference) {
  return gap_from_costs(cost(q, w), cost(q, reference));
}

QuboMatrix random_positive_qubo(std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed, "random-qubo");
  std::uniform_real_distribution<double> off(0.0, 1.0);
  // Ensemble QUBOs have nearly uniform diagonals; a narrow spread keeps the
  // instance difficulty in the coupling structure.
  std::uniform_real_distribution<double> diag(-0.6, -0.4);
  QuboMatrix q(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) q.set(i, j, off(rng));
  }
  for (std::size_t i = 0; i < n; ++i) q.set(i, i, diag(rng) * static_cast<double>(n) * 0.5);
  return q;
}

void to_json(Json& j, const QuboMatrix& q) {
  Json entries = Json::array();
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t k = i; k < q.size(); ++k)
      if (q(i, k) != 0.0 || i == k) entries.push_back(Json::array({i, k, q(i, k)}));
  j = Json{{"n", q.size()}, {"lambda", q.lambda()}, {"n_samples", q.n_samples()},
           {"entries", entries}};
}

void from_json(const Json& j, QuboMatrix& q) {
  reject_unknown_keys(j, {"n", "lambda", "n_samples", "entries"}, "QUBO file");
  auto n = j.at("n").get<std::size_t>();
  QuboMatrix out(n, j.value("lambda", 0.0), j.value("n_samples", std::size_t{0}));
  for (const auto& e : j.at("entries")) {
    if (!e.is_array() || e.size() != 3) throw std::runtime_error("QUBO entry must be [i, j, value]");
    auto a = e.at(0).get<std::size_t>(), b = e.at(1).get<std::size_t>();
    if (a >= n || b >= n) throw std::runtime_error("QUBO entry index out of range");
    out.set(a, b, e.at(2).get<double>());
  }
  q = std::move(out);
}

}  // namespace qboost
