#include <doctest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "qboost/metrics.hpp"

using namespace qboost;

TEST_SUITE("metrics") {
  TEST_CASE("confusion counts") {
    std::vector<int> y{1, -1, -1, 1};
    auto perfect = confusion(y, y);
    CHECK(perfect.fp == 0);
    CHECK(perfect.fn == 0);
    std::vector<int> neg(4, -1);
    auto none = confusion(neg, y);
    CHECK(none.tp == 0);
    CHECK(*precision_recall(none).recall == 0.0);
    CHECK_FALSE(precision_recall(none).precision.has_value());
    std::vector<int> pred{1, 1, -1, -1};
    auto c = confusion(pred, y);
    CHECK(c.tp == 1);
    CHECK(c.fp == 1);
    CHECK(c.tn == 1);
    CHECK(c.fn == 1);
    CHECK(c.total() == 4);
    CHECK_THROWS(confusion(std::vector<int>{1}, y));
    // Permutation invariance.
    std::vector<int> p2{-1, 1, 1, -1}, y2{1, -1, 1, -1};
    auto c2 = confusion(p2, y2);
    CHECK(c2.tp == c.tp);
    CHECK(c2.fp == c.fp);
  }

  TEST_CASE("precision and recall") {
    auto pr = precision_recall({1, 1, 0, 1});
    CHECK(*pr.precision == 0.5);
    CHECK(*pr.recall == 0.5);
    auto target = precision_recall({83, 213, 0, 17});  // P ~ 0.28, R = 0.83
    CHECK(*target.recall == doctest::Approx(0.83));
    CHECK(*target.precision == doctest::Approx(0.28).epsilon(0.01));
    CHECK_FALSE(precision_recall({0, 0, 5, 0}).recall.has_value());
  }

  TEST_CASE("separable margins reach P = R = 1") {
    std::vector<double> m{-2, -1, -0.5, 0.5, 1, 2};
    std::vector<int> y{-1, -1, -1, 1, 1, 1};
    auto curve = pr_curve(m, y, 50);
    bool perfect = false;
    for (const auto& p : curve.points) perfect = perfect || (p.precision == 1.0 && p.recall == 1.0);
    CHECK(perfect);
    for (const auto& p : curve.points) {
      if (p.threshold > -0.5 && p.threshold <= 0.5) {
        CHECK(p.recall == 1.0);
        CHECK(p.precision == 1.0);
      }
    }
    for (std::size_t k = 1; k < curve.points.size(); ++k) CHECK(curve.points[k].recall > curve.points[k - 1].recall);
    CHECK_THROWS(pr_curve(m, std::vector<int>(6, 1), 10));
    CHECK_THROWS(pr_curve(m, y, 1));
  }

  TEST_CASE("random margins: precision at full recall approaches prevalence") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> m;
    std::vector<int> y;
    for (int i = 0; i < 20000; ++i) {
      m.push_back(u(rng));
      y.push_back(u(rng) < 0.12 ? 1 : -1);
    }
    double prevalence = 0.0;
    for (int v : y) prevalence += v > 0 ? 1.0 / 20000 : 0.0;
    auto curve = pr_curve(m, y, 500);
    CHECK(curve.points.back().recall == 1.0);
    CHECK(curve.points.back().precision == doctest::Approx(prevalence).epsilon(0.01));
    for (const auto& p : curve.points) {
      CHECK(p.precision >= 0.0);
      CHECK(p.precision <= 1.0);
    }
  }

  TEST_CASE("more thresholds than distinct margins add no points") {
    std::vector<double> m{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<int> y{-1, 1, -1, 1, -1, 1};
    auto a = pr_curve(m, y, 6);
    auto b = pr_curve(m, y, 6001);
    CHECK(b.points.size() == a.points.size());
  }

  TEST_CASE("interpolation at the target recall") {
    PrCurve c{{{0.3, 0.30, 0.82}, {0.2, 0.24, 0.85}}};
    CHECK(precision_at_recall(c, 0.83) == doctest::Approx(0.28));
    CHECK(precision_at_recall(c) == doctest::Approx(0.28));
    CHECK(precision_at_recall(c, 0.82) == doctest::Approx(0.30));
    CHECK_THROWS_AS(precision_at_recall(c, 0.9), std::out_of_range);
    CHECK_THROWS_AS(precision_at_recall(c, 0.5), std::out_of_range);
    CHECK(kDefaultRecallTarget == 0.83);
    // Exact on collinear points.
    PrCurve line{{{0, 0.9, 0.1}, {0, 0.6, 0.4}, {0, 0.3, 0.7}}};
    CHECK(precision_at_recall(line, 0.25) == doctest::Approx(0.75));
    CHECK(precision_at_recall(line, 0.55) == doctest::Approx(0.45));
    auto csv = pr_curve_csv(line);
    CHECK(csv.header == std::vector<std::string>{"threshold", "precision", "recall"});
  }
}
