#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qboost/dataset.hpp"
#include "qboost/io.hpp"

namespace qboost {

enum class LearnerKind { decision_tree, knn, gaussian_nb, logistic_regression };

std::string to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(std::string_view name);

struct LearnerParams {
  int max_depth = 3;               // decision_tree
  int k = 5;                       // knn
  double l2 = 1e-3;                // logistic_regression ridge strength
  int max_iter = 50;               // logistic_regression Newton steps
  double feature_fraction = 1.0;   // random-subspace share of the features
};

void to_json(Json& j, const LearnerParams& p);
void from_json(const Json& j, LearnerParams& p);

namespace detail {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 1;
};

struct TreeModel {
  std::vector<TreeNode> nodes;
};

struct KnnModel {
  int k = 5;
  std::size_t dim = 0;
  std::vector<double> points;  // row-major, dim columns
  std::vector<int> labels;
};

struct GnbModel {
  // index 0: class -1, index 1: class +1
  std::vector<double> mean[2];
  std::vector<double> var[2];
  double log_prior[2] = {0.0, 0.0};
};

struct LogisticModel {
  std::vector<double> coef;
  double bias = 0.0;
};

}  // namespace detail

// A trained base classifier mapping a feature vector to {-1, +1}. Learners
// see a fixed subset of the features (all of them unless a feature fraction
// below one was requested). Immutable once fitted.
class WeakLearner {
 public:
  LearnerKind kind() const { return kind_; }
  std::size_t n_features() const { return n_features_; }
  const std::vector<std::size_t>& feature_subset() const { return features_; }
  bool is_constant() const { return constant_.has_value(); }

  int predict(std::span<const double> x) const;

  friend WeakLearner fit(LearnerKind kind, const Dataset& data,
                         std::span<const double> sample_weights,
                         const LearnerParams& params, std::uint64_t seed);
  friend void to_json(Json& j, const WeakLearner& l);
  friend void from_json(const Json& j, WeakLearner& l);

 private:
  LearnerKind kind_ = LearnerKind::decision_tree;
  std::size_t n_features_ = 0;
  std::vector<std::size_t> features_;
  std::optional<int> constant_;
  std::variant<detail::TreeModel, detail::KnnModel, detail::GnbModel, detail::LogisticModel>
      model_;
};

// Fits a learner of the given kind under a sample distribution (weights sum
// to one). Trees use the weights natively, as do naive Bayes and logistic
// regression; kNN resamples the rows proportionally to the weights unless
// they are uniform. Single-class data yields a constant learner.
WeakLearner fit(LearnerKind kind, const Dataset& data, std::span<const double> sample_weights,
                const LearnerParams& params, std::uint64_t seed);

// Dense N x S matrix of +-1 votes, H(i, s) = h_i(x_s).
class PredictionMatrix {
 public:
  PredictionMatrix() = default;
  PredictionMatrix(std::size_t n_learners, std::size_t n_samples)
      : n_learners_(n_learners), n_samples_(n_samples), values_(n_learners * n_samples, 1) {}

  std::size_t n_learners() const { return n_learners_; }
  std::size_t n_samples() const { return n_samples_; }
  int operator()(std::size_t i, std::size_t s) const { return values_[i * n_samples_ + s]; }
  void set(std::size_t i, std::size_t s, int v) {
    values_[i * n_samples_ + s] = static_cast<std::int8_t>(v);
  }
  std::span<const std::int8_t> row(std::size_t i) const {
    return std::span(values_).subspan(i * n_samples_, n_samples_);
  }

 private:
  std::size_t n_learners_ = 0;
  std::size_t n_samples_ = 0;
  std::vector<std::int8_t> values_;
};

PredictionMatrix predict_matrix(std::span<const WeakLearner> ensemble, const Dataset& data);

// Sequential reweighting state: sample distribution D plus the per-learner
// weighted errors, log-odds weights and normalizers accumulated so far.
struct BoostState {
  std::vector<double> distribution;
  std::vector<double> epsilons;
  std::vector<double> real_weights;
  std::vector<double> normalizers;

  static BoostState uniform(std::size_t n_samples);
};

inline constexpr double kEpsilonFloor = 1e-12;

BoostState boost_step(std::span<const std::int8_t> predictions, std::span<const int> labels,
                      const BoostState& state);

enum class EnsembleVariant { boosting, subsampling };

std::string to_string(EnsembleVariant v);
EnsembleVariant ensemble_variant_from_string(std::string_view name);

struct EnsembleConfig {
  std::size_t n_learners = 10;
  std::vector<std::pair<LearnerKind, double>> mix = {{LearnerKind::decision_tree, 0.5},
                                                     {LearnerKind::knn, 0.5}};
  EnsembleVariant variant = EnsembleVariant::subsampling;
  std::size_t n_subsets = 4;
  LearnerParams params = {.feature_fraction = 0.5};
  std::uint64_t seed = 0;

  void validate() const;
};

void to_json(Json& j, const EnsembleConfig& c);
void from_json(const Json& j, EnsembleConfig& c);

// Learner kinds in training order: counts follow the mix by largest
// remainder and the kinds are interleaved so every temporal subset receives
// a comparable blend.
std::vector<LearnerKind> expand_mix(const EnsembleConfig& config);

struct Ensemble {
  std::vector<WeakLearner> learners;
  std::vector<std::size_t> subset_of;  // temporal subset each learner saw
  PredictionMatrix predictions;        // on the full training set
};

Ensemble train_ensemble(const EnsembleConfig& config, const Dataset& train);

}  // namespace qboost
