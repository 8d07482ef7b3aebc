#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qboost/dataset.hpp"
#include "qboost/io.hpp"
#include "qboost/learners.hpp"
#include "qboost/qubo.hpp"

namespace qboost {

// C(x) = sign(sum_i w_i h_i(x) - T) with binary w. The margin is the
// argument of the sign; exact zeros classify as +1.
struct StrongClassifier {
  std::vector<WeakLearner> ensemble;
  Bitstring weights;
  double threshold = 0.0;
  double lambda = 0.0;

  std::size_t n_learners() const { return ensemble.size(); }
  // No learner selected: every margin equals -T.
  bool degenerate() const { return weights.count() == 0; }
  void validate() const;

  double margin(std::span<const double> x) const;
  int predict(std::span<const double> x) const;
};

// Sign (-1, 0 or +1) of the mean normalised vote over the training rows.
double compute_threshold(std::span<const WeakLearner> ensemble, const Bitstring& weights, const Dataset& train);
// Same from precomputed training votes.
double compute_threshold(const PredictionMatrix& h, const Bitstring& weights);

StrongClassifier make_classifier(std::vector<WeakLearner> ensemble, Bitstring weights, const Dataset& train,
                                 double lambda = 0.0);

std::vector<double> margins(const StrongClassifier& c, const Dataset& data);
std::vector<int> predict_labels(const StrongClassifier& c, const Dataset& data);

// lambda_N = lambda_10 * 10 / N.
double scale_lambda(double lambda10, std::size_t n_learners);

// Solves a QUBO for the weight vector; the default is exhaustive search.
using WeightSolver = std::function<Bitstring(const QuboMatrix&)>;

struct LambdaScore {
  double lambda = 0.0;
  std::optional<double> precision;  // absent when the curve misses the recall target
};

struct LambdaTuning {
  double best = 0.0;
  std::vector<LambdaScore> scores;
};

// Grid search at N = 10 learners on an 80/20 stratified split, scoring
// precision at the target recall on the held-out part. Ties keep the first
// grid value. With per_sample set, grid values are multiplied by the size of
// the fitting part before entering the QUBO.
LambdaTuning tune_lambda_scores(const EnsembleConfig& config, const Dataset& train, std::span<const double> grid,
                                std::uint64_t seed, const WeightSolver& solver = {},
                                double recall_target = 0.83, std::size_t n_thresholds = 200,
                                bool per_sample = false);
double tune_lambda(const EnsembleConfig& config, const Dataset& train, std::span<const double> grid,
                   std::uint64_t seed);

void to_json(Json& j, const StrongClassifier& c);
void from_json(const Json& j, StrongClassifier& c);

// Columns: id, margin, label.
CsvTable predictions_csv(const StrongClassifier& c, const Dataset& data);

}  // namespace qboost
