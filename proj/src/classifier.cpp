#include "qboost/classifier.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qboost/metrics.hpp"
#include "qboost/random.hpp"

namespace qboost {

namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

void StrongClassifier::validate() const {
  if (weights.size() != ensemble.size()) {
    throw std::invalid_argument("classifier: " + std::to_string(weights.size()) + " weights for " +
                                std::to_string(ensemble.size()) + " learners");
  }
}

double StrongClassifier::margin(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    if (weights[i]) s += ensemble[i].predict(x);
  }
  if (!ensemble.empty() && weights.count() == 0) {
    // Still checks the feature dimension.
    (void)ensemble.front().predict(x);
  }
  return s - threshold;
}

int StrongClassifier::predict(std::span<const double> x) const { return margin(x) >= 0.0 ? 1 : -1; }

double compute_threshold(const PredictionMatrix& h, const Bitstring& weights) {
  if (weights.size() != h.n_learners()) throw std::invalid_argument("compute_threshold: size mismatch");
  if (h.n_samples() == 0) throw std::invalid_argument("compute_threshold: empty training set");
  // Integer sum keeps the sign exact; the 1/(N S) factor cannot change it.
  long long total = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!weights[i]) continue;
    for (auto v : h.row(i)) total += v;
  }
  return sign_of(static_cast<double>(total));
}

double compute_threshold(std::span<const WeakLearner> ensemble, const Bitstring& weights, const Dataset& train) {
  return compute_threshold(predict_matrix(ensemble, train), weights);
}

StrongClassifier make_classifier(std::vector<WeakLearner> ensemble, Bitstring weights, const Dataset& train,
                                 double lambda) {
  StrongClassifier c;
  c.ensemble = std::move(ensemble);
  c.weights = std::move(weights);
  c.lambda = lambda;
  c.validate();
  c.threshold = compute_threshold(c.ensemble, c.weights, train);
  return c;
}

std::vector<double> margins(const StrongClassifier& c, const Dataset& data) {
  c.validate();
  std::vector<double> m;
  m.reserve(data.size());
  for (const auto& row : data.rows()) m.push_back(c.margin(row.features));
  return m;
}

std::vector<int> predict_labels(const StrongClassifier& c, const Dataset& data) {
  std::vector<int> out;
  out.reserve(data.size());
  for (double m : margins(c, data)) out.push_back(m >= 0.0 ? 1 : -1);
  return out;
}

double scale_lambda(double lambda10, std::size_t n_learners) {
  if (n_learners == 0) throw std::invalid_argument("scale_lambda: N must be positive");
  return n_learners <= 10 ? lambda10 : lambda10 * 10.0 / static_cast<double>(n_learners);
}

LambdaTuning tune_lambda_scores(const EnsembleConfig& config, const Dataset& train, std::span<const double> grid,
                                std::uint64_t seed, const WeightSolver& solver, double recall_target,
                                std::size_t n_thresholds, bool per_sample) {
  if (grid.empty()) throw std::invalid_argument("tune_lambda: empty lambda grid");
  EnsembleConfig small = config;
  small.n_learners = 10;
  small.seed = derive_seed(seed, "tune_lambda.ensemble");
  small.validate();
  const auto [fit_part, val_part] = stratified_split(train, 0.8, derive_seed(seed, "tune_lambda.split"));
  const auto ens = train_ensemble(small, fit_part);
  const auto labels = fit_part.labels();
  const auto val_labels = val_part.labels();

  LambdaTuning out;
  double best_p = -1.0;
  for (const double lam : grid) {
    const double scale = per_sample ? static_cast<double>(fit_part.size()) : 1.0;
    const auto q = build_qubo(ens.predictions, labels, lam * scale);
    const Bitstring w = solver ? solver(q) : brute_force_min(q).first;
    const auto c = make_classifier(ens.learners, w, fit_part, lam * scale);
    LambdaScore s{lam, std::nullopt};
    try {
      const auto curve = pr_curve(margins(c, val_part), val_labels, n_thresholds);
      s.precision = precision_at_recall(curve, recall_target);
    } catch (const std::out_of_range&) {
      // Curve never reaches the target recall; the grid point scores nothing.
    }
    if (s.precision && *s.precision > best_p) {
      best_p = *s.precision;
      out.best = lam;
    }
    out.scores.push_back(s);
  }
  if (best_p < 0.0) out.best = grid.front();
  return out;
}

double tune_lambda(const EnsembleConfig& config, const Dataset& train, std::span<const double> grid,
                   std::uint64_t seed) {
  return tune_lambda_scores(config, train, grid, seed).best;
}

void to_json(Json& j, const StrongClassifier& c) {
  j = Json::object();
  j["ensemble"] = c.ensemble;
  j["weights"] = c.weights.to_string();
  j["threshold"] = c.threshold;
  j["lambda"] = c.lambda;
}

void from_json(const Json& j, StrongClassifier& c) {
  reject_unknown_keys(j, {"ensemble", "weights", "threshold", "lambda", "config_sha256"}, "model");
  c = StrongClassifier{};
  c.ensemble = j.at("ensemble").get<std::vector<WeakLearner>>();
  c.weights = Bitstring::from_string(j.at("weights").get<std::string>());
  c.threshold = j.at("threshold").get<double>();
  c.lambda = j.value("lambda", 0.0);
  c.validate();
}

CsvTable predictions_csv(const StrongClassifier& c, const Dataset& data) {
  CsvTable t;
  t.header = {"id", "margin", "label"};
  const auto m = margins(c, data);
  for (std::size_t i = 0; i < m.size(); ++i) {
    t.rows.push_back({std::to_string(i), format_double(m[i]), m[i] >= 0.0 ? "1" : "-1"});
  }
  return t;
}

}  // namespace qboost
