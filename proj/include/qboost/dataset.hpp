#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qboost/io.hpp"

namespace qboost {

// One labeled observation. Labels are +1 (positive, e.g. a fallen angel) or
// -1; dates are ordinal days (days since 1970-01-01 when parsed from ISO).
struct Row {
  std::vector<double> features;
  int label = -1;
  std::int64_t date = 0;
};

// Immutable tabular dataset. All rows share the feature dimension.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<std::string> feature_names, std::vector<Row> rows);

  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  std::size_t n_features() const { return feature_names_.size(); }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<Row>& rows() const { return rows_; }
  const Row& operator[](std::size_t i) const { return rows_[i]; }

  std::vector<int> labels() const;
  std::size_t count_positive() const;
  std::size_t count_negative() const { return size() - count_positive(); }
  double positive_fraction() const;

  // Rows at the given indices, in that order.
  Dataset subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<std::string> feature_names_;
  std::vector<Row> rows_;
};

struct SyntheticSpec {
  std::size_t n_rows = 20000;
  std::size_t n_features = 12;
  double positive_fraction_train = 0.09;
  double positive_fraction_test = 0.12;
  std::size_t n_periods = 8;
  std::uint64_t seed = 7;

  void validate() const;
};

void to_json(Json& j, const SyntheticSpec& s);
void from_json(const Json& j, SyntheticSpec& s);

// Share of rows assigned to the (earlier) training period.
inline constexpr double kSyntheticTrainShare = 0.7;

enum class RebalanceMode { undersample, oversample };

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 const std::string& date_column);
void save_csv(const std::filesystem::path& path, const Dataset& d,
              const std::string& label_column = "label",
              const std::string& date_column = "date");

// Parses "YYYY-MM-DD" or a plain integer into an ordinal day.
std::int64_t parse_date(const std::string& text);

std::pair<Dataset, Dataset> generate_synthetic(const SyntheticSpec& spec);

Dataset rebalance(const Dataset& d, RebalanceMode mode, std::uint64_t seed);

std::vector<Dataset> temporal_subsample(const Dataset& d, std::size_t n_subsets);

std::pair<Dataset, Dataset> stratified_split(const Dataset& d, double train_fraction,
                                             std::uint64_t seed);

}  // namespace qboost
