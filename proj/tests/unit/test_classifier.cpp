#include <doctest.h>

#include <cmath>
#include <vector>

#include "qboost/classifier.hpp"
#include "qboost/qubo.hpp"

using namespace qboost;

namespace {

std::vector<double> uniform_weights(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

Dataset line(const std::vector<int>& labels) {
  std::vector<Row> rows;
  for (std::size_t i = 0; i < labels.size(); ++i) rows.push_back({{static_cast<double>(i)}, labels[i], static_cast<std::int64_t>(i)});
  return Dataset({"x"}, std::move(rows));
}

// Stump voting +1 for x > cut.
WeakLearner stump(double cut) {
  std::vector<int> y;
  for (int i = 0; i < 8; ++i) y.push_back(i > cut ? 1 : -1);
  LearnerParams p;
  p.max_depth = 1;
  auto d = line(y);
  return fit(LearnerKind::decision_tree, d, uniform_weights(d.size()), p, 1);
}

WeakLearner constant(int label) {
  auto d = line({label, label, label});
  return fit(LearnerKind::decision_tree, d, uniform_weights(3), LearnerParams{}, 1);
}

}  // namespace

TEST_SUITE("classifier") {
  TEST_CASE("threshold of unanimous positive votes") {
    auto d = line({1, -1, 1, -1});
    std::vector<WeakLearner> e{constant(1), constant(1)};
    CHECK(compute_threshold(e, Bitstring::from_string("10"), d) == 1.0);
    CHECK(compute_threshold(e, Bitstring::from_string("11"), d) == 1.0);
    CHECK(compute_threshold(e, Bitstring::from_string("00"), d) == 0.0);
  }

  TEST_CASE("threshold 2-learner 4-sample hand case") {
    auto d = line({-1, -1, 1, 1});
    std::vector<WeakLearner> e{stump(1.5), stump(2.5)};
    // Votes: A = -1 -1 +1 +1, B = -1 -1 -1 +1; total -2 -> T = -1.
    CHECK(compute_threshold(e, Bitstring::from_string("11"), d) == -1.0);
    // A alone sums to zero.
    CHECK(compute_threshold(e, Bitstring::from_string("10"), d) == 0.0);
    std::vector<WeakLearner> e2{stump(0.5), stump(1.5)};
    // A = -1 +1 +1 +1, B = -1 -1 +1 +1; total 2 -> T = +1.
    CHECK(compute_threshold(e2, Bitstring::from_string("11"), d) == 1.0);
  }

  TEST_CASE("prediction delegation and tie rule") {
    auto d = line({-1, -1, 1, 1});
    auto a = stump(1.5);
    StrongClassifier c{{a}, Bitstring::from_string("1"), 0.0, 0.0};
    for (const auto& r : d.rows()) CHECK(c.predict(r.features) == a.predict(r.features));
    StrongClassifier tie{{constant(1), constant(-1)}, Bitstring::from_string("11"), 0.0, 0.0};
    CHECK(tie.margin(std::vector<double>{3.0}) == 0.0);
    CHECK(tie.predict(std::vector<double>{3.0}) == 1);
    CHECK_THROWS(c.predict(std::vector<double>{1.0, 2.0}));
    StrongClassifier bad{{a}, Bitstring::from_string("11"), 0.0, 0.0};
    CHECK_THROWS(bad.validate());
  }

  TEST_CASE("labels match a direct evaluation of the voting rule") {
    SyntheticSpec spec;
    spec.n_rows = 3000;
    auto [train, test] = generate_synthetic(spec);
    EnsembleConfig cfg;
    cfg.n_learners = 8;
    cfg.seed = 4;
    auto ens = train_ensemble(cfg, train);
    auto q = build_qubo(ens.predictions, train.labels(), 0.01 * static_cast<double>(train.size()));
    auto w = brute_force_min(q).first;
    auto c = make_classifier(ens.learners, w, train);
    auto h = predict_matrix(ens.learners, test);
    auto labels = predict_labels(c, test);
    for (std::size_t s = 0; s < test.size(); ++s) {
      double vote = 0.0;
      for (std::size_t i = 0; i < 8; ++i) vote += w[i] * h(i, s);
      CHECK(labels[s] == (vote - c.threshold >= 0.0 ? 1 : -1));
    }
    // Sub-ensemble with all-ones weights and the same threshold agrees.
    std::vector<WeakLearner> sub;
    for (std::size_t i = 0; i < 8; ++i)
      if (w[i]) sub.push_back(ens.learners[i]);
    if (!sub.empty()) {
      StrongClassifier sc{sub, Bitstring(std::vector<std::uint8_t>(sub.size(), 1)), c.threshold, 0.0};
      CHECK(predict_labels(sc, test) == labels);
    }
    // Flipping one selected vote moves the margin by exactly 2.
    StrongClassifier one{{constant(1), constant(-1)}, Bitstring::from_string("10"), 0.0, 0.0};
    StrongClassifier flipped{{constant(-1), constant(-1)}, Bitstring::from_string("10"), 0.0, 0.0};
    CHECK(one.margin(std::vector<double>{0.0}) - flipped.margin(std::vector<double>{0.0}) == 2.0);
  }

  TEST_CASE("oracle weights beat every single-learner weight vector on the QUBO cost") {
    SyntheticSpec spec;
    spec.n_rows = 2000;
    auto [train, test] = generate_synthetic(spec);
    EnsembleConfig cfg;
    cfg.n_learners = 12;
    cfg.seed = 9;
    auto ens = train_ensemble(cfg, train);
    auto q = build_qubo(ens.predictions, train.labels(), 0.005 * static_cast<double>(train.size()));
    auto [w, c] = brute_force_min(q);
    for (std::size_t i = 0; i < 12; ++i) {
      Bitstring e(12);
      e.set(i, true);
      CHECK(c <= cost(q, e));
    }
  }

  TEST_CASE("lambda scaling") {
    CHECK(scale_lambda(0.8, 20) == doctest::Approx(0.4));
    CHECK(scale_lambda(0.8, 10) == 0.8);
    CHECK(scale_lambda(0.8, 5) == 0.8);
  }

  TEST_CASE("lambda tuning") {
    SyntheticSpec spec;
    spec.n_rows = 2500;
    auto [train, test] = generate_synthetic(spec);
    EnsembleConfig cfg;
    cfg.seed = 2;
    const std::vector<double> one{37.0};
    CHECK(tune_lambda(cfg, train, one, 3) == 37.0);
    CHECK_THROWS(tune_lambda(cfg, train, std::vector<double>{}, 3));
    const std::vector<double> grid{0.0, 5.0, 50.0, 500.0};
    auto t = tune_lambda_scores(cfg, train, grid, 3);
    CHECK(t.scores.size() == 4);
    bool found = false;
    for (double g : grid) found = found || g == t.best;
    CHECK(found);
    CHECK(tune_lambda(cfg, train, grid, 3) == t.best);
  }

  TEST_CASE("model JSON round trip") {
    auto d = line({-1, -1, 1, 1});
    auto c = make_classifier({stump(1.5), constant(1)}, Bitstring::from_string("11"), d, 0.25);
    Json j = c;
    auto back = j.get<StrongClassifier>();
    CHECK(back.threshold == c.threshold);
    CHECK(back.lambda == 0.25);
    CHECK(margins(back, d) == margins(c, d));
    j["mystery"] = 1;
    CHECK_THROWS(j.get<StrongClassifier>());
    auto csv = predictions_csv(c, d);
    CHECK(csv.header == std::vector<std::string>{"id", "margin", "label"});
    CHECK(csv.rows.size() == 4);
  }
}
