#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "qboost/learners.hpp"
#include "qboost/random.hpp"

using namespace qboost;

namespace {

std::vector<double> uniform_weights(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

Dataset one_d(const std::vector<double>& xs, const std::vector<int>& ys) {
  std::vector<Row> rows;
  for (std::size_t i = 0; i < xs.size(); ++i) rows.push_back({{xs[i]}, ys[i], static_cast<std::int64_t>(i)});
  return Dataset({"x"}, std::move(rows));
}

Dataset blobs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Row> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = i % 4 == 0 ? 1 : -1;
    rows.push_back({{g(rng) + (y > 0 ? 1.5 : 0.0), g(rng), g(rng) - (y > 0 ? 0.5 : 0.0)}, y,
                    static_cast<std::int64_t>(i)});
  }
  return Dataset({"a", "b", "c"}, std::move(rows));
}

std::int64_t corr(const PredictionMatrix& h, std::size_t i, std::size_t j) {
  std::int64_t c = 0;
  for (std::size_t s = 0; s < h.n_samples(); ++s) c += h(i, s) * h(j, s);
  return c;
}

}  // namespace

TEST_SUITE("learners") {
  TEST_CASE("depth-1 tree separates 1-D data between the classes") {
    auto d = one_d({-3, -2, -1, -0.5, 0.5, 1, 2, 3}, {-1, -1, -1, -1, 1, 1, 1, 1});
    LearnerParams p;
    p.max_depth = 1;
    auto l = fit(LearnerKind::decision_tree, d, uniform_weights(d.size()), p, 1);
    for (const auto& r : d.rows()) CHECK(l.predict(r.features) == r.label);
    CHECK(l.predict(std::vector<double>{-0.6}) == -1);
    CHECK(l.predict(std::vector<double>{0.6}) == 1);
  }

  TEST_CASE("1-NN reproduces training labels") {
    auto d = blobs(60, 3);
    LearnerParams p;
    p.k = 1;
    auto l = fit(LearnerKind::knn, d, uniform_weights(d.size()), p, 1);
    for (const auto& r : d.rows()) CHECK(l.predict(r.features) == r.label);
    p.k = 61;
    CHECK_THROWS(fit(LearnerKind::knn, d, uniform_weights(d.size()), p, 1));
  }

  TEST_CASE("gaussian naive Bayes boundary sits at the midpoint of equal-variance means") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> xs;
    std::vector<int> ys;
    for (int i = 0; i < 4000; ++i) {
      const int y = i % 2 ? 1 : -1;
      xs.push_back(g(rng) + 2.0 * y + 1.0);  // means -1 and 3, midpoint 1
      ys.push_back(y);
    }
    auto d = one_d(xs, ys);
    auto l = fit(LearnerKind::gaussian_nb, d, uniform_weights(d.size()), LearnerParams{}, 1);
    CHECK(l.predict(std::vector<double>{0.8}) == -1);
    CHECK(l.predict(std::vector<double>{1.2}) == 1);
    CHECK(l.predict(std::vector<double>{-5.0}) == -1);
    CHECK(l.predict(std::vector<double>{7.0}) == 1);
  }

  TEST_CASE("logistic regression fits separable-ish data") {
    auto d = blobs(400, 5);
    auto l = fit(LearnerKind::logistic_regression, d, uniform_weights(d.size()), LearnerParams{}, 1);
    CHECK(l.predict(std::vector<double>{4.0, 0.0, -2.0}) == 1);
    CHECK(l.predict(std::vector<double>{-3.0, 0.0, 2.0}) == -1);
  }

  TEST_CASE("single-class data yields a constant learner") {
    auto d = one_d({1, 2, 3}, {1, 1, 1});
    for (auto kind : {LearnerKind::decision_tree, LearnerKind::knn, LearnerKind::gaussian_nb,
                      LearnerKind::logistic_regression}) {
      LearnerParams p;
      p.k = 1;
      auto l = fit(kind, d, uniform_weights(3), p, 1);
      CHECK(l.is_constant());
      CHECK(l.predict(std::vector<double>{-100.0}) == 1);
    }
  }

  TEST_CASE("fit rejects bad weights") {
    auto d = one_d({1, 2}, {1, -1});
    CHECK_THROWS(fit(LearnerKind::decision_tree, d, std::vector<double>{0.2, 0.2}, LearnerParams{}, 1));
    CHECK_THROWS(fit(LearnerKind::decision_tree, d, std::vector<double>{1.0}, LearnerParams{}, 1));
  }

  TEST_CASE("predict_matrix rows and correlations") {
    auto d = one_d({1, 2, 3, 4}, {1, 1, 1, 1});
    auto c = fit(LearnerKind::decision_tree, d, uniform_weights(4), LearnerParams{}, 1);
    auto eval = blobs(30, 9);
    CHECK_THROWS(predict_matrix(std::vector<WeakLearner>{c}, eval));  // dimension mismatch
    auto m = predict_matrix(std::vector<WeakLearner>{c}, d);
    for (std::size_t s = 0; s < 4; ++s) CHECK(m(0, s) == 1);

    auto t = fit(LearnerKind::decision_tree, eval, uniform_weights(30), LearnerParams{}, 1);
    auto h = predict_matrix(std::vector<WeakLearner>{t, t}, eval);
    CHECK(corr(h, 0, 1) == 30);
    for (std::size_t s = 0; s < 30; ++s) CHECK(std::abs(h(0, s)) == 1);

    // Anti-correlated pair: flip every label of the training set.
    std::vector<Row> flipped;
    for (const auto& r : eval.rows()) flipped.push_back({r.features, -r.label, r.date});
    Dataset f(eval.feature_names(), flipped);
    auto tf = fit(LearnerKind::decision_tree, f, uniform_weights(30), LearnerParams{}, 1);
    auto h2 = predict_matrix(std::vector<WeakLearner>{t, tf}, eval);
    CHECK(corr(h2, 0, 1) == -30);
    CHECK_THROWS(predict_matrix(std::vector<WeakLearner>{}, eval));
  }

  TEST_CASE("boost_step on a perfect learner keeps D uniform") {
    std::vector<std::int8_t> h{1, -1, 1, -1};
    std::vector<int> y{1, -1, 1, -1};
    auto s = boost_step(h, y, BoostState::uniform(4));
    CHECK(s.epsilons.back() == doctest::Approx(kEpsilonFloor));
    for (double d : s.distribution) CHECK(d == doctest::Approx(0.25));
  }

  TEST_CASE("boost_step with epsilon 1/2 leaves D unchanged") {
    std::vector<std::int8_t> h{1, 1, 1, 1};
    std::vector<int> y{1, 1, -1, -1};
    auto s = boost_step(h, y, BoostState::uniform(4));
    CHECK(s.epsilons.back() == doctest::Approx(0.5));
    CHECK(s.real_weights.back() == doctest::Approx(0.0));
    for (double d : s.distribution) CHECK(d == doctest::Approx(0.25));
  }

  TEST_CASE("boost_step 4-sample hand calculation") {
    std::vector<std::int8_t> h{1, 1, 1, 1};
    std::vector<int> y{1, 1, 1, -1};
    auto s = boost_step(h, y, BoostState::uniform(4));
    CHECK(s.epsilons.back() == doctest::Approx(0.25));
    const double w = 0.5 * std::log(3.0);
    CHECK(s.real_weights.back() == doctest::Approx(w));
    // Unnormalized: 0.25 e^{-w} (x3) and 0.25 e^{w}; e^{w} = sqrt(3).
    const double a = 0.25 / std::sqrt(3.0), b = 0.25 * std::sqrt(3.0);
    const double z = 3 * a + b;
    CHECK(s.normalizers.back() == doctest::Approx(z));
    CHECK(s.distribution[0] == doctest::Approx(a / z));
    CHECK(s.distribution[3] == doctest::Approx(b / z));
    CHECK(s.distribution[3] == doctest::Approx(0.5));  // misclassified mass becomes one half
  }

  TEST_CASE("boost_step keeps D a distribution over many random steps") {
    std::mt19937_64 rng(4);
    const std::size_t n = 50;
    std::vector<int> y(n);
    for (auto& v : y) v = rng() % 2 ? 1 : -1;
    auto s = BoostState::uniform(n);
    for (int step = 0; step < 40; ++step) {
      std::vector<std::int8_t> h(n);
      for (std::size_t k = 0; k < n; ++k) h[k] = (rng() % 5 == 0) ? static_cast<std::int8_t>(-y[k]) : static_cast<std::int8_t>(y[k]);
      s = boost_step(h, y, s);
      CHECK(std::accumulate(s.distribution.begin(), s.distribution.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-10));
      for (double d : s.distribution) CHECK(d >= 0.0);
      CHECK(s.epsilons.back() >= 0.0);
      CHECK(s.epsilons.back() <= 1.0);
    }
  }

  TEST_CASE("expand_mix counts") {
    EnsembleConfig c;
    c.n_learners = 50;
    auto k = expand_mix(c);
    CHECK(std::count(k.begin(), k.end(), LearnerKind::decision_tree) == 25);
    CHECK(std::count(k.begin(), k.end(), LearnerKind::knn) == 25);
    c.mix = {{LearnerKind::decision_tree, 0.6}, {LearnerKind::knn, 0.5}};
    CHECK_THROWS(c.validate());
  }

  TEST_CASE("subsampling partitions learners across subsets") {
    auto d = blobs(200, 2);
    EnsembleConfig c;
    c.n_learners = 4;
    c.n_subsets = 2;
    c.seed = 3;
    auto e = train_ensemble(c, d);
    CHECK(e.learners.size() == 4);
    CHECK(e.subset_of == std::vector<std::size_t>{0, 0, 1, 1});
    CHECK(e.predictions.n_learners() == 4);
    CHECK(e.predictions.n_samples() == 200);
    auto e2 = train_ensemble(c, d);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t s = 0; s < 200; ++s) CHECK(e.predictions(i, s) == e2.predictions(i, s));
  }

  TEST_CASE("boosting with one learner equals a plain uniform fit") {
    auto d = blobs(120, 8);
    EnsembleConfig c;
    c.n_learners = 1;
    c.n_subsets = 1;
    c.variant = EnsembleVariant::boosting;
    c.seed = 5;
    c.mix = {{LearnerKind::decision_tree, 1.0}};
    auto e = train_ensemble(c, d);
    auto l = fit(LearnerKind::decision_tree, d, uniform_weights(d.size()), c.params, derive_seed(5, "learner", 0));
    auto h = predict_matrix(std::vector<WeakLearner>{l}, d);
    for (std::size_t s = 0; s < d.size(); ++s) CHECK(h(0, s) == e.predictions(0, s));
  }

  TEST_CASE("boosting can produce negatively correlated learners") {
    // Alternating blocks along x: a stump fits one boundary, reweighting
    // pushes the next stump to vote the opposite way on large regions.
    std::vector<double> xs;
    std::vector<int> ys;
    for (int i = 0; i < 120; ++i) {
      xs.push_back(i);
      ys.push_back((i / 20) % 2 ? 1 : -1);
    }
    auto d = one_d(xs, ys);
    EnsembleConfig c;
    c.n_learners = 6;
    c.n_subsets = 1;
    c.variant = EnsembleVariant::boosting;
    c.mix = {{LearnerKind::decision_tree, 1.0}};
    c.params.max_depth = 1;
    c.params.feature_fraction = 1.0;
    c.seed = 1;
    auto e = train_ensemble(c, d);
    bool negative = false;
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = i + 1; j < 6; ++j) negative = negative || corr(e.predictions, i, j) < 0;
    CHECK(negative);
  }

  TEST_CASE("learner JSON round trip preserves predictions") {
    auto d = blobs(80, 6);
    for (auto kind : {LearnerKind::decision_tree, LearnerKind::knn, LearnerKind::gaussian_nb,
                      LearnerKind::logistic_regression}) {
      LearnerParams p;
      p.feature_fraction = 0.67;
      auto l = fit(kind, d, uniform_weights(d.size()), p, 2);
      Json j = l;
      auto back = j.get<WeakLearner>();
      for (const auto& r : d.rows()) CHECK(back.predict(r.features) == l.predict(r.features));
    }
  }

  TEST_CASE("kind names") {
    CHECK(learner_kind_from_string("knn") == LearnerKind::knn);
    CHECK(to_string(LearnerKind::gaussian_nb) == "gaussian_nb");
    CHECK_THROWS(learner_kind_from_string("svm"));
  }
}
