#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "qboost/learners.hpp"
#include "qboost/rgs.hpp"
#include "qboost/solvers.hpp"

using namespace qboost;

namespace {

QuboMatrix built_qubo(std::size_t n, std::size_t s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PredictionMatrix h(n, s);
  std::vector<int> y(s);
  for (auto& v : y) v = rng() % 2 ? 1 : -1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < s; ++k) h.set(i, k, rng() % 3 ? y[k] : -y[k]);
  return build_qubo(h, y, 0.02 * static_cast<double>(s));
}

void check_monotone(const SolveTrace& t) {
  std::optional<double> prev;
  for (const auto& r : t.records()) {
    if (prev) CHECK(*r.best_cost <= *prev);
    if (r.best_cost) prev = r.best_cost;
  }
}

Register line_register(std::size_t n, double spacing) {
  Register r;
  for (std::size_t i = 0; i < n; ++i) r.positions.push_back({spacing * static_cast<double>(i % 4), spacing * static_cast<double>(i / 4)});
  return r;
}

}  // namespace

TEST_SUITE("solvers") {
  TEST_CASE("uniform sampling") {
    QuboMatrix q(1);
    q.set(0, 0, -3.0);
    auto t = uniform_solve(q, 100, 1);
    CHECK(t.size() == 100);
    CHECK(*t.best_cost() == -3.0);
    auto q12 = built_qubo(12, 30, 2);
    auto a = uniform_solve(q12, 300, 5), b = uniform_solve(q12, 300, 5);
    CHECK(a.sampled() == b.sampled());
    check_monotone(a);
    CHECK_THROWS(uniform_solve(q12, 0, 1));
  }

  TEST_CASE("SA schedule") {
    SaSchedule s;
    CHECK(s.beta(0) == doctest::Approx(0.1));
    CHECK(s.beta(s.n_sweeps - 1) == doctest::Approx(10.0));
    CHECK(s.beta(500) > s.beta(499));
    SaSchedule bad;
    bad.beta_final = 0.05;
    CHECK_THROWS(bad.validate());
    Json j = s;
    CHECK(j.get<SaSchedule>().n_sweeps == 1000);
  }

  TEST_CASE("SA on a diagonal-negative QUBO reaches all ones") {
    QuboMatrix q(10);
    for (std::size_t i = 0; i < 10; ++i) q.set(i, i, -1.0 - 0.1 * static_cast<double>(i));
    SaSchedule s;
    s.start_all_ones = true;
    s.beta_final = 1e6;
    auto t = simulated_annealing(q, s, 3, 1);
    CHECK(t.best_bitstring()->count() == 10);
    CHECK(*t.best_cost() == doctest::Approx(-14.5));
    SaSchedule r;
    CHECK(simulated_annealing(q, r, 2, 9).best_bitstring()->count() == 10);
  }

  TEST_CASE("SA matches brute force on built N=12 QUBOs") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto q = built_qubo(12, 50, seed);
      auto [w, c] = brute_force_min(q);
      auto t = simulated_annealing(q, SaSchedule{}, 20, seed);
      CHECK(*t.best_cost() == doctest::Approx(c).epsilon(1e-12));
      CHECK(t.size() == 20);
      check_monotone(t);
      auto t2 = simulated_annealing(q, SaSchedule{}, 20, seed);
      CHECK(t.sampled() == t2.sampled());
    }
  }

  TEST_CASE("SA reaches 1% gap on N=40 positive QUBOs within 1e5 sweeps") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto q = random_positive_qubo(40, seed);
      auto [ref, rc] = reference_solution(q, 77);
      SaSchedule s;
      s.n_sweeps = 1000;
      auto t = simulated_annealing(q, s, 100, seed);
      CHECK(gap_from_costs(*t.best_cost(), rc) < 0.01);
    }
  }

  TEST_CASE("reference solution dispatch") {
    auto q = built_qubo(10, 20, 4);
    CHECK(reference_solution(q).second == brute_force_min(q).second);
  }

  TEST_CASE("local descent reaches a single-flip local minimum") {
    auto q = random_positive_qubo(14, 8);
    auto w = local_descent(q, Bitstring::from_index(12345, 14));
    const double c = cost(q, w);
    for (std::size_t i = 0; i < 14; ++i) {
      auto f = w;
      f.flip(i);
      CHECK(cost(q, f) >= c - 1e-12);
    }
  }

  TEST_CASE("QAOA budget and trace") {
    auto q = random_positive_qubo(6, 3);
    auto reg = line_register(6, 8.0);
    auto t = qaoa_naive(q, reg, 10, 100, 2);
    CHECK(t.size() == 1000);
    check_monotone(t);
    auto t2 = qaoa_naive(q, reg, 10, 100, 2);
    CHECK(t.sampled() == t2.sampled());
    CHECK_THROWS(qaoa_naive(q, line_register(5, 8.0), 2, 10, 1));
  }

  TEST_CASE("QAOA with zero durations samples the ground state") {
    auto q = random_positive_qubo(5, 1);
    QaoaOptions o;
    o.shape.t_rise = o.shape.t_sweep = o.shape.t_fall = 0.0;
    auto t = qaoa_naive(q, line_register(5, 8.0), 3, 50, 1, o);
    for (const auto& r : t.records()) {
      CHECK(r.bitstring->count() == 0);
      CHECK(*r.cost == 0.0);
    }
  }

  TEST_CASE("trace CSV") {
    SolveTrace t("x", 1);
    t.push(3, std::nullopt, std::nullopt);
    t.push_scored(Bitstring::from_string("101"), -2.0);
    t.push_scored(Bitstring::from_string("111"), -1.0);
    auto csv = t.to_csv(-4.0);
    CHECK(csv.header == std::vector<std::string>{"cycle", "atom_count", "cost", "best_cost", "gap", "bitstring"});
    REQUIRE(csv.rows.size() == 3);
    CHECK(csv.rows[0][2].empty());
    CHECK(csv.rows[2][3] == "-2");
    CHECK(csv.rows[2][4] == "0.5");
    CHECK(*t.best_bitstring() == Bitstring::from_string("101"));
  }
}
