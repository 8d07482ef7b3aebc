#include "qboost/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qboost/random.hpp"

namespace qboost {

Dataset::Dataset(std::vector<std::string> feature_names, std::vector<Row> rows)
    : feature_names_(std::move(feature_names)), rows_(std::move(rows)) {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    if (r.features.size() != feature_names_.size()) {
      throw std::invalid_argument("row " + std::to_string(i) + " has " +
                                  std::to_string(r.features.size()) +
                                  " features, expected " +
                                  std::to_string(feature_names_.size()));
    }
    if (r.label != 1 && r.label != -1) {
      throw std::invalid_argument("row " + std::to_string(i) + " has label " +
                                  std::to_string(r.label) + ", expected -1 or +1");
    }
  }
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r.label);
  return out;
}

std::size_t Dataset::count_positive() const {
  return static_cast<std::size_t>(
      std::count_if(rows_.begin(), rows_.end(), [](const Row& r) { return r.label > 0; }));
}

double Dataset::positive_fraction() const {
  return rows_.empty() ? 0.0 : static_cast<double>(count_positive()) / rows_.size();
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<Row> rows;
  rows.reserve(indices.size());
  for (auto i : indices) rows.push_back(rows_.at(i));
  return Dataset(feature_names_, std::move(rows));
}

void SyntheticSpec::validate() const {
  if (n_rows < 10) throw std::invalid_argument("synthetic spec: n_rows must be >= 10");
  if (n_features < 2) throw std::invalid_argument("synthetic spec: n_features must be >= 2");
  auto check_fraction = [](double f, const char* name) {
    if (!(f > 0.0 && f < 1.0)) {
      throw std::invalid_argument(std::string("synthetic spec: ") + name +
                                  " must lie in (0, 1)");
    }
  };
  check_fraction(positive_fraction_train, "positive_fraction_train");
  check_fraction(positive_fraction_test, "positive_fraction_test");
  if (n_periods < 1) throw std::invalid_argument("synthetic spec: n_periods must be >= 1");
}

void to_json(Json& j, const SyntheticSpec& s) {
  j = Json{{"n_rows", s.n_rows},
           {"n_features", s.n_features},
           {"positive_fraction_train", s.positive_fraction_train},
           {"positive_fraction_test", s.positive_fraction_test},
           {"n_periods", s.n_periods},
           {"seed", s.seed}};
}

void from_json(const Json& j, SyntheticSpec& s) {
  reject_unknown_keys(j,
                      {"n_rows", "n_features", "positive_fraction_train",
                       "positive_fraction_test", "n_periods", "seed"},
                      "synthetic spec");
  SyntheticSpec d;
  s.n_rows = j.value("n_rows", d.n_rows);
  s.n_features = j.value("n_features", d.n_features);
  s.positive_fraction_train = j.value("positive_fraction_train", d.positive_fraction_train);
  s.positive_fraction_test = j.value("positive_fraction_test", d.positive_fraction_test);
  s.n_periods = j.value("n_periods", d.n_periods);
  s.seed = j.value("seed", d.seed);
  s.validate();
}

std::int64_t parse_date(const std::string& text) {
  std::int64_t v = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec == std::errc() && res.ptr == last) return v;

  int y = 0;
  unsigned m = 0, d = 0;
  if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
    bool ok = std::from_chars(first, first + 4, y).ec == std::errc() &&
              std::from_chars(first + 5, first + 7, m).ec == std::errc() &&
              std::from_chars(first + 8, first + 10, d).ec == std::errc();
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                    std::chrono::day{d}};
    if (ok && ymd.ok()) {
      return std::chrono::sys_days{ymd}.time_since_epoch().count();
    }
  }
  throw std::invalid_argument("unparseable date \"" + text + "\"");
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 const std::string& date_column) {
  CsvTable table = read_csv(path);
  auto find = [&](const std::string& name) -> std::ptrdiff_t {
    auto it = std::find(table.header.begin(), table.header.end(), name);
    return it == table.header.end() ? -1 : it - table.header.begin();
  };
  auto label_idx = find(label_column);
  if (label_idx < 0) throw std::runtime_error("label column not found: " + label_column);
  auto date_idx = find(date_column);
  if (date_idx < 0) throw std::runtime_error("date column not found: " + date_column);
  if (table.rows.empty()) throw std::runtime_error("CSV file has no data rows: " + path.string());

  std::vector<std::size_t> feature_cols;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (static_cast<std::ptrdiff_t>(c) == label_idx ||
        static_cast<std::ptrdiff_t>(c) == date_idx) {
      continue;
    }
    feature_cols.push_back(c);
    names.push_back(table.header[c]);
  }

  std::vector<Row> rows;
  rows.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    auto where = [&](std::size_t c) {
      return "row " + std::to_string(r + 2) + ", column \"" + table.header[c] + "\"";
    };
    Row row;
    const std::string& lab = cells[label_idx];
    if (lab == "1" || lab == "+1") {
      row.label = 1;
    } else if (lab == "0" || lab == "-1") {
      row.label = -1;
    } else {
      throw std::runtime_error("invalid label \"" + lab + "\" at " + where(label_idx));
    }
    try {
      row.date = parse_date(cells[date_idx]);
    } catch (const std::invalid_argument&) {
      throw std::runtime_error("invalid date \"" + cells[date_idx] + "\" at " + where(date_idx));
    }
    row.features.reserve(feature_cols.size());
    for (auto c : feature_cols) {
      const std::string& cell = cells[c];
      double v = 0.0;
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw std::runtime_error("non-numeric cell \"" + cell + "\" at " + where(c));
      }
      row.features.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return Dataset(std::move(names), std::move(rows));
}

void save_csv(const std::filesystem::path& path, const Dataset& d,
              const std::string& label_column, const std::string& date_column) {
  CsvTable table;
  table.header.push_back(date_column);
  for (const auto& n : d.feature_names()) table.header.push_back(n);
  table.header.push_back(label_column);
  table.rows.reserve(d.size());
  for (const auto& r : d.rows()) {
    std::vector<std::string> cells;
    cells.reserve(r.features.size() + 2);
    cells.push_back(std::to_string(r.date));
    for (double v : r.features) cells.push_back(format_double(v));
    cells.push_back(r.label > 0 ? "1" : "0");
    table.rows.push_back(std::move(cells));
  }
  write_csv(path, table);
}

namespace {

constexpr std::int64_t kPeriodDays = 365;
constexpr std::int64_t kFirstDay = 11323;  // 2001-01-01

struct DriftModel {
  std::size_t n_features;
  std::size_t n_informative;
  std::vector<double> base_shift;
  std::vector<double> phase;

  // Class-conditional mean at continuous time t (in periods). Positives come
  // from a two-component mixture; the second component mirrors the first
  // informative direction so no single linear cut captures the class.
  std::vector<double> mean(int label, int component, double t) const {
    std::vector<double> mu(n_features, 0.0);
    // Common drift on a non-informative coordinate and a slow rotation of the
    // informative block; both make the periods look different.
    mu[n_features - 1] = 0.35 * t;
    if (label < 0) return mu;
    for (std::size_t k = 0; k < n_informative; ++k) {
      double strength = base_shift[k] * (1.0 + 0.45 * std::sin(0.8 * t + phase[k]));
      mu[k] = strength;
    }
    if (component == 1) mu[0] = -mu[0];
    return mu;
  }
};

Dataset draw_block(const DriftModel& model, std::size_t n, double pos_fraction,
                   std::int64_t day_begin, std::int64_t day_end, double period_begin,
                   double period_end, Rng& rng, const std::vector<std::string>& names) {
  auto n_pos = static_cast<std::size_t>(std::llround(pos_fraction * static_cast<double>(n)));
  n_pos = std::clamp<std::size_t>(n_pos, 1, n - 1);
  std::vector<int> labels(n, -1);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_pos), 1);
  std::shuffle(labels.begin(), labels.end(), rng);

  std::vector<std::int64_t> days(n);
  std::uniform_int_distribution<std::int64_t> day_dist(day_begin, day_end - 1);
  for (auto& d : days) d = day_dist(rng);
  std::sort(days.begin(), days.end());

  std::normal_distribution<double> noise(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<Row> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double frac = static_cast<double>(days[i] - day_begin) /
                  static_cast<double>(std::max<std::int64_t>(1, day_end - day_begin));
    double t = period_begin + frac * (period_end - period_begin);
    int component = coin(rng) ? 1 : 0;
    auto mu = model.mean(labels[i], component, t);
    Row r;
    r.label = labels[i];
    r.date = days[i];
    r.features.resize(model.n_features);
    for (std::size_t k = 0; k < model.n_features; ++k) r.features[k] = mu[k] + noise(rng);
    rows.push_back(std::move(r));
  }
  return Dataset(names, std::move(rows));
}

}  // namespace

std::pair<Dataset, Dataset> generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng model_rng = make_rng(spec.seed, "synthetic-model");
  DriftModel model;
  model.n_features = spec.n_features;
  model.n_informative = std::max<std::size_t>(1, std::min(spec.n_features - 1, spec.n_features / 2));
  std::uniform_real_distribution<double> shift(0.6, 1.3);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  for (std::size_t k = 0; k < model.n_informative; ++k) {
    model.base_shift.push_back(shift(model_rng));
    model.phase.push_back(angle(model_rng));
  }

  std::vector<std::string> names;
  for (std::size_t k = 0; k < spec.n_features; ++k) names.push_back("f" + std::to_string(k));

  auto n_train = static_cast<std::size_t>(
      std::llround(kSyntheticTrainShare * static_cast<double>(spec.n_rows)));
  n_train = std::clamp<std::size_t>(n_train, 2, spec.n_rows - 2);
  std::size_t n_test = spec.n_rows - n_train;

  auto periods = static_cast<double>(spec.n_periods);
  std::int64_t train_end = kFirstDay + static_cast<std::int64_t>(spec.n_periods) * kPeriodDays;
  Rng train_rng = make_rng(spec.seed, "synthetic-train");
  Rng test_rng = make_rng(spec.seed, "synthetic-test");
  Dataset train = draw_block(model, n_train, spec.positive_fraction_train, kFirstDay, train_end,
                             0.0, periods, train_rng, names);
  Dataset test = draw_block(model, n_test, spec.positive_fraction_test, train_end,
                            train_end + kPeriodDays, periods, periods + 1.0, test_rng, names);
  return {std::move(train), std::move(test)};
}

Dataset rebalance(const Dataset& d, RebalanceMode mode, std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < d.size(); ++i) (d[i].label > 0 ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) {
    throw std::invalid_argument("rebalance requires both classes to be present");
  }
  Rng rng = make_rng(seed, "rebalance");
  auto& minority = pos.size() <= neg.size() ? pos : neg;
  auto& majority = pos.size() <= neg.size() ? neg : pos;

  std::vector<std::size_t> chosen;
  if (mode == RebalanceMode::undersample) {
    std::vector<std::size_t> maj = majority;
    std::shuffle(maj.begin(), maj.end(), rng);
    maj.resize(minority.size());
    chosen = minority;
    chosen.insert(chosen.end(), maj.begin(), maj.end());
  } else {
    chosen.resize(d.size());
    std::iota(chosen.begin(), chosen.end(), 0);
    std::uniform_int_distribution<std::size_t> pick(0, minority.size() - 1);
    for (std::size_t k = minority.size(); k < majority.size(); ++k) {
      chosen.push_back(minority[pick(rng)]);
    }
  }
  std::shuffle(chosen.begin(), chosen.end(), rng);
  return d.subset(chosen);
}

std::vector<Dataset> temporal_subsample(const Dataset& d, std::size_t n_subsets) {
  if (n_subsets < 1) throw std::invalid_argument("temporal_subsample: n_subsets must be >= 1");
  if (n_subsets > d.size()) {
    throw std::invalid_argument("temporal_subsample: n_subsets (" + std::to_string(n_subsets) +
                                ") exceeds row count (" + std::to_string(d.size()) + ")");
  }
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a].date < d[b].date; });

  std::vector<Dataset> out;
  out.reserve(n_subsets);
  std::size_t base = d.size() / n_subsets, extra = d.size() % n_subsets, begin = 0;
  for (std::size_t s = 0; s < n_subsets; ++s) {
    std::size_t len = base + (s < extra ? 1 : 0);
    out.push_back(d.subset(std::span(order).subspan(begin, len)));
    begin += len;
  }
  return out;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& d, double train_fraction,
                                             std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("stratified_split: train_fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < d.size(); ++i) (d[i].label > 0 ? pos : neg).push_back(i);
  if (pos.size() < 2 || neg.size() < 2) {
    throw std::invalid_argument("stratified_split: each class needs at least 2 rows");
  }
  Rng rng = make_rng(seed, "stratified-split");
  std::vector<std::size_t> train_idx, test_idx;
  for (auto* cls : {&neg, &pos}) {
    std::vector<std::size_t> idx = *cls;
    std::shuffle(idx.begin(), idx.end(), rng);
    auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(idx.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
    train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    test_idx.insert(test_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return {d.subset(train_idx), d.subset(test_idx)};
}

}  // namespace qboost
