#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qboost/learners.hpp"
#include "qboost/qubo.hpp"
#include "qboost/solvers.hpp"

using namespace qboost;

namespace {

struct Instance {
  PredictionMatrix h;
  std::vector<int> y;
};

Instance random_instance(std::size_t n, std::size_t s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Instance in{PredictionMatrix(n, s), std::vector<int>(s)};
  for (auto& v : in.y) v = rng() % 2 ? 1 : -1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < s; ++k) in.h.set(i, k, rng() % 3 ? in.y[k] : -in.y[k]);
  return in;
}

// Squared-loss ensemble objective evaluated directly from the votes.
double objective(const Instance& in, const Bitstring& w, double lambda) {
  const double n = static_cast<double>(in.h.n_learners());
  double total = 0.0;
  for (std::size_t s = 0; s < in.h.n_samples(); ++s) {
    double vote = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) vote += w[i] * in.h(i, s);
    total += std::pow(vote / n - in.y[s], 2);
  }
  return total + lambda * static_cast<double>(w.count());
}

double double_loop(const QuboMatrix& q, const Bitstring& w) {
  double c = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) c += q(i, j) * w[i] * w[j];
  return c;
}

}  // namespace

TEST_SUITE("qubo") {
  TEST_CASE("bitstring basics") {
    auto b = Bitstring::from_string("0110");
    CHECK(b.to_string() == "0110");
    CHECK(b.count() == 2);
    CHECK(b.to_index() == 6);
    CHECK(Bitstring::from_index(6, 4) == b);
    CHECK(Bitstring::from_string("001") < Bitstring::from_string("010"));
    CHECK_THROWS(Bitstring::from_string("01x"));
  }

  TEST_CASE("single learner equal to the labels") {
    Instance in{PredictionMatrix(1, 4), {1, -1, 1, 1}};
    for (std::size_t s = 0; s < 4; ++s) in.h.set(0, s, in.y[s]);
    auto q = build_qubo(in.h, in.y, 0.0);
    CHECK(q(0, 0) == doctest::Approx(-4.0));
  }

  TEST_CASE("identical learners couple with S") {
    auto in = random_instance(2, 9, 1);
    for (std::size_t s = 0; s < 9; ++s) in.h.set(1, s, in.h(0, s));
    auto q = build_qubo(in.h, in.y, 0.0);
    CHECK(q(0, 1) == doctest::Approx(9.0));
    CHECK(q(1, 0) == doctest::Approx(9.0));
  }

  TEST_CASE("build dimension mismatch") {
    auto in = random_instance(3, 5, 2);
    std::vector<int> short_y(4, 1);
    CHECK_THROWS(build_qubo(in.h, short_y, 0.0));
  }

  TEST_CASE("QUBO cost reproduces the squared-loss objective on every bitstring") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const std::size_t n = 3 + seed % 10;  // up to 12
      auto in = random_instance(n, 17 + seed, seed);
      const double lambda = 0.01 * static_cast<double>(seed);
      auto q = build_qubo(in.h, in.y, lambda);
      const double s = static_cast<double>(in.y.size());
      const double nn = static_cast<double>(n * n);
      for (std::uint64_t idx = 0; idx < (1ull << n); ++idx) {
        auto w = Bitstring::from_index(idx, n);
        REQUIRE(cost(q, w) == doctest::Approx(nn * (objective(in, w, lambda) - s)).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("argmin agrees with the direct objective for N=3") {
    auto in = random_instance(3, 11, 77);
    auto q = build_qubo(in.h, in.y, 0.1);
    Bitstring best_direct;
    double best = INFINITY;
    for (std::uint64_t idx = 0; idx < 8; ++idx) {
      auto w = Bitstring::from_index(idx, 3);
      const double v = objective(in, w, 0.1);
      if (v < best - 1e-12 || (std::abs(v - best) <= 1e-12 && w < best_direct)) {
        best = v;
        best_direct = w;
      }
    }
    CHECK(brute_force_min(q).first == best_direct);
  }

  TEST_CASE("cost evaluations") {
    auto q = random_positive_qubo(10, 3);
    CHECK(cost(q, Bitstring(10)) == 0.0);
    for (std::size_t i = 0; i < 10; ++i) {
      Bitstring e(10);
      e.set(i, true);
      CHECK(cost(q, e) == doctest::Approx(q(i, i)));
    }
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
      auto w = Bitstring::from_index(rng() & 1023u, 10);
      CHECK(cost(q, w) == doctest::Approx(double_loop(q, w)).epsilon(1e-12));
    }
    CHECK_THROWS(cost(q, Bitstring(9)));
  }

  TEST_CASE("brute force trivial cases") {
    QuboMatrix id(6);
    for (std::size_t i = 0; i < 6; ++i) id.set(i, i, 1.0);
    auto [w0, c0] = brute_force_min(id);
    CHECK(w0 == Bitstring(6));
    CHECK(c0 == 0.0);
    QuboMatrix neg(6);
    for (std::size_t i = 0; i < 6; ++i) neg.set(i, i, -1.0);
    auto [w1, c1] = brute_force_min(neg);
    CHECK(w1.count() == 6);
    CHECK(c1 == -6.0);
    CHECK_THROWS(brute_force_min(QuboMatrix(25)));
  }

  TEST_CASE("brute force breaks ties toward the lexicographically smallest bitstring") {
    QuboMatrix q(3);  // w0 or w2 alone cost -1; both together cost 0
    q.set(0, 0, -1.0);
    q.set(2, 2, -1.0);
    q.set(0, 2, 0.5);
    CHECK(brute_force_min(q).first == Bitstring::from_string("001"));
  }

  TEST_CASE("brute force agrees with long simulated annealing for built QUBOs at N=12") {
    SaSchedule sched;
    sched.n_sweeps = 200000;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto in = random_instance(12, 40, 100 + seed);
      auto q = build_qubo(in.h, in.y, 0.05);
      auto [w, c] = brute_force_min(q);
      auto sa = simulated_annealing(q, sched, 1, seed);
      CHECK(*sa.best_cost() == doctest::Approx(c).epsilon(1e-12));
    }
  }

  TEST_CASE("Gray-code enumeration matches cost") {
    auto q = random_positive_qubo(11, 9);
    std::size_t visited = 0;
    for_each_cost(q, 24, [&](std::uint64_t idx, double c) {
      ++visited;
      CHECK(c == doctest::Approx(cost(q, Bitstring::from_index(idx, 11))).epsilon(1e-9));
    });
    CHECK(visited == 2048);
  }

  TEST_CASE("gap") {
    auto q = random_positive_qubo(8, 4);
    auto [ref, c] = brute_force_min(q);
    CHECK(gap(q, ref, ref) == 0.0);
    CHECK(gap_from_costs(-99.0, -100.0) == doctest::Approx(0.01));
    CHECK_THROWS(gap_from_costs(1.0, 0.0));
    for (std::uint64_t idx = 0; idx < 256; ++idx) CHECK(gap(q, Bitstring::from_index(idx, 8), ref) >= 0.0);
  }

  TEST_CASE("JSON round trip is bit exact") {
    auto in = random_instance(7, 13, 21);
    auto q = build_qubo(in.h, in.y, 0.123456789);
    Json j = q;
    CHECK(j.contains("entries"));
    CHECK(j["n"] == 7);
    auto back = j.get<QuboMatrix>();
    CHECK(back.lambda() == q.lambda());
    for (std::size_t a = 0; a < 7; ++a)
      for (std::size_t b = 0; b < 7; ++b) CHECK(back(a, b) == q(a, b));
    auto parsed = parse_json_text(j.dump(), "test").get<QuboMatrix>();
    CHECK(parsed(0, 0) == q(0, 0));
  }

  TEST_CASE("random positive QUBO structure") {
    auto q = random_positive_qubo(15, 2);
    CHECK(q.all_off_diagonal_nonnegative());
    for (std::size_t i = 0; i < 15; ++i) CHECK(q(i, i) < 0.0);
  }
}
