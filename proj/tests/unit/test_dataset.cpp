#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "qboost/dataset.hpp"
#include "support.hpp"

using namespace qboost;

namespace {

Dataset make_dataset(std::size_t n_neg, std::size_t n_pos, std::uint64_t shuffle_seed = 0) {
  std::vector<Row> rows;
  for (std::size_t i = 0; i < n_neg + n_pos; ++i) {
    rows.push_back({{static_cast<double>(i), static_cast<double>(i % 7)}, i < n_neg ? -1 : 1,
                    static_cast<std::int64_t>(1000 + i)});
  }
  if (shuffle_seed) std::shuffle(rows.begin(), rows.end(), std::mt19937_64(shuffle_seed));
  return Dataset({"f0", "f1"}, std::move(rows));
}

// Identity of a row within make_dataset output: its first feature.
std::multiset<double> ids(const Dataset& d) {
  std::multiset<double> s;
  for (const auto& r : d.rows()) s.insert(r.features[0]);
  return s;
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("load_csv maps 0/1 labels to -1/+1 and keeps row order") {
    test_support::TempDir dir;
    auto p = dir.write("d.csv", "date,x,y,label\n2020-01-01,1.5,2,0\n2020-01-02,3,4,1\n2020-01-03,5,6,0\n2020-01-04,7,8,1\n");
    auto d = load_csv(p, "label", "date");
    REQUIRE(d.size() == 4);
    CHECK(d.labels() == std::vector<int>{-1, 1, -1, 1});
    CHECK(d.n_features() == 2);
    CHECK(d[0].features == std::vector<double>{1.5, 2.0});
    CHECK(d[1].date - d[0].date == 1);
  }

  TEST_CASE("load_csv errors") {
    test_support::TempDir dir;
    auto p = dir.write("d.csv", "date,x,target\n1,2,0\n");
    CHECK_THROWS_WITH(load_csv(p, "label", "date"), doctest::Contains("label column not found"));
    CHECK_THROWS_WITH(load_csv(p, "target", "when"), doctest::Contains("date column not found"));
    auto bad = dir.write("bad.csv", "date,x,label\n1,abc,0\n");
    CHECK_THROWS_WITH(load_csv(bad, "label", "date"), doctest::Contains("non-numeric"));
    auto empty = dir.write("empty.csv", "");
    CHECK_THROWS(load_csv(empty, "label", "date"));
    CHECK_THROWS(load_csv(dir.file("missing.csv"), "label", "date"));
  }

  TEST_CASE("load_csv handles a 90000 x 150 file") {
    test_support::TempDir dir;
    const auto p = dir.file("big.csv");
    {
      std::ofstream out(p, std::ios::binary);
      out << "date";
      for (int f = 0; f < 150; ++f) out << ",f" << f;
      out << ",label\n";
      std::string body;
      for (int f = 0; f < 150; ++f) body += "," + std::to_string(f % 10) + ".5";
      for (int r = 0; r < 90000; ++r) out << (r % 3000) << body << ',' << (r % 11 == 0 ? 1 : 0) << '\n';
    }
    auto d = load_csv(p, "label", "date");
    CHECK(d.size() == 90000);
    CHECK(d.n_features() == 150);
    CHECK(d[5].features[149] == doctest::Approx(9.5));
  }

  TEST_CASE("save_csv then load_csv reproduces the dataset") {
    test_support::TempDir dir;
    auto d = make_dataset(5, 3);
    save_csv(dir.file("o.csv"), d);
    auto back = load_csv(dir.file("o.csv"), "label", "date");
    REQUIRE(back.size() == d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(back[i].features == d[i].features);
      CHECK(back[i].label == d[i].label);
      CHECK(back[i].date == d[i].date);
    }
  }

  TEST_CASE("dates parse from ISO text and integers") {
    CHECK(parse_date("1970-01-01") == 0);
    CHECK(parse_date("2001-01-01") == 11323);
    CHECK(parse_date("42") == 42);
    CHECK_THROWS(parse_date("yesterday"));
  }

  TEST_CASE("synthetic data: determinism and class fractions") {
    SyntheticSpec spec;
    auto [tr1, te1] = generate_synthetic(spec);
    auto [tr2, te2] = generate_synthetic(spec);
    REQUIRE(tr1.size() == tr2.size());
    for (std::size_t i = 0; i < tr1.size(); ++i) {
      CHECK(tr1[i].features == tr2[i].features);
      CHECK(tr1[i].label == tr2[i].label);
    }
    CHECK(tr1.positive_fraction() >= 0.08);
    CHECK(tr1.positive_fraction() <= 0.10);
    CHECK(te1.positive_fraction() >= 0.11);
    CHECK(te1.positive_fraction() <= 0.13);
    CHECK(tr1.size() + te1.size() == spec.n_rows);
    // Test rows come after the training period.
    std::int64_t max_train = 0, min_test = INT64_MAX;
    for (const auto& r : tr1.rows()) max_train = std::max(max_train, r.date);
    for (const auto& r : te1.rows()) min_test = std::min(min_test, r.date);
    CHECK(max_train <= min_test);
  }

  TEST_CASE("synthetic spec validation") {
    SyntheticSpec s;
    s.positive_fraction_train = 1.0;
    CHECK_THROWS(s.validate());
    s = SyntheticSpec{};
    s.n_periods = 0;
    CHECK_THROWS(s.validate());
  }

  TEST_CASE("rebalance counts") {
    auto d = make_dataset(90, 10);
    auto u = rebalance(d, RebalanceMode::undersample, 3);
    CHECK(u.count_negative() == 10);
    CHECK(u.count_positive() == 10);
    auto o = rebalance(d, RebalanceMode::oversample, 3);
    CHECK(o.count_negative() == 90);
    CHECK(o.count_positive() == 90);
    auto b = make_dataset(20, 20);
    CHECK(ids(rebalance(b, RebalanceMode::undersample, 5)) == ids(b));
    CHECK(ids(rebalance(b, RebalanceMode::oversample, 5)) == ids(b));
    CHECK_THROWS(rebalance(make_dataset(10, 0), RebalanceMode::undersample, 1));
  }

  TEST_CASE("rebalance never drops (oversample) or duplicates (undersample)") {
    auto d = make_dataset(37, 9);
    auto o = rebalance(d, RebalanceMode::oversample, 11);
    auto all = ids(d);
    for (double id : all) CHECK(ids(o).count(id) >= 1);
    auto u = rebalance(d, RebalanceMode::undersample, 11);
    auto us = ids(u);
    for (double id : us) CHECK(us.count(id) == 1);
    // Determinism per seed.
    CHECK(ids(rebalance(d, RebalanceMode::oversample, 11)) == ids(o));
  }

  TEST_CASE("temporal_subsample partitions by date") {
    auto d = make_dataset(60, 40, 99);  // shuffled dates
    auto parts = temporal_subsample(d, 4);
    REQUIRE(parts.size() == 4);
    std::size_t total = 0;
    std::multiset<double> seen;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      CHECK(parts[k].size() == 25);
      total += parts[k].size();
      for (double id : ids(parts[k])) seen.insert(id);
      if (k + 1 < parts.size()) {
        std::int64_t mx = INT64_MIN, mn = INT64_MAX;
        for (const auto& r : parts[k].rows()) mx = std::max(mx, r.date);
        for (const auto& r : parts[k + 1].rows()) mn = std::min(mn, r.date);
        CHECK(mx <= mn);
      }
    }
    CHECK(total == d.size());
    CHECK(seen == ids(d));
    auto one = temporal_subsample(d, 1);
    REQUIRE(one.size() == 1);
    CHECK(ids(one[0]) == ids(d));
    CHECK_THROWS(temporal_subsample(d, 101));
    CHECK_THROWS(temporal_subsample(d, 0));
  }

  TEST_CASE("stratified_split preserves class proportions") {
    auto d = make_dataset(90, 10);
    auto [tr, te] = stratified_split(d, 0.8, 5);
    CHECK(tr.size() == 80);
    CHECK(tr.count_positive() == 8);
    CHECK(te.size() == 20);
    auto [tr2, te2] = stratified_split(d, 0.8, 5);
    CHECK(ids(tr2) == ids(tr));
    std::multiset<double> uni = ids(tr);
    for (double id : ids(te)) uni.insert(id);
    CHECK(uni == ids(d));
    CHECK(std::abs(tr.positive_fraction() - d.positive_fraction()) <= 1.0 / static_cast<double>(tr.size()));

    auto small = make_dataset(4, 4);
    auto [a, b] = stratified_split(small, 0.5, 1);
    CHECK(a.count_positive() == 2);
    CHECK(a.count_negative() == 2);
    CHECK(b.count_positive() == 2);
    CHECK(b.count_negative() == 2);
    CHECK_THROWS(stratified_split(make_dataset(10, 1), 0.8, 1));
    CHECK_THROWS(stratified_split(d, 1.0, 1));
  }

  TEST_CASE("dataset invariants") {
    CHECK_THROWS(Dataset({"a"}, {Row{{1.0, 2.0}, 1, 0}}));
    CHECK_THROWS(Dataset({"a"}, {Row{{1.0}, 0, 0}}));
  }
}
