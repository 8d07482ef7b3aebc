#include "qboost/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include <Eigen/Dense>

#include "qboost/random.hpp"

namespace qboost {

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::decision_tree: return "decision_tree";
    case LearnerKind::knn: return "knn";
    case LearnerKind::gaussian_nb: return "gaussian_nb";
    case LearnerKind::logistic_regression: return "logistic_regression";
  }
  return "unknown";
}

LearnerKind learner_kind_from_string(std::string_view name) {
  if (name == "decision_tree" || name == "dt") return LearnerKind::decision_tree;
  if (name == "knn") return LearnerKind::knn;
  if (name == "gaussian_nb" || name == "gnb") return LearnerKind::gaussian_nb;
  if (name == "logistic_regression" || name == "lr") return LearnerKind::logistic_regression;
  throw std::invalid_argument("unknown learner kind \"" + std::string(name) + "\"");
}

std::string to_string(EnsembleVariant v) {
  return v == EnsembleVariant::boosting ? "boosting" : "subsampling";
}

EnsembleVariant ensemble_variant_from_string(std::string_view name) {
  if (name == "boosting") return EnsembleVariant::boosting;
  if (name == "subsampling") return EnsembleVariant::subsampling;
  throw std::invalid_argument("unknown ensemble variant \"" + std::string(name) + "\"");
}

void to_json(Json& j, const LearnerParams& p) {
  j = Json{{"max_depth", p.max_depth},
           {"k", p.k},
           {"l2", p.l2},
           {"max_iter", p.max_iter},
           {"feature_fraction", p.feature_fraction}};
}

void from_json(const Json& j, LearnerParams& p) {
  reject_unknown_keys(j, {"max_depth", "k", "l2", "max_iter", "feature_fraction"},
                      "learner params");
  LearnerParams d = p;
  p.max_depth = j.value("max_depth", d.max_depth);
  p.k = j.value("k", d.k);
  p.l2 = j.value("l2", d.l2);
  p.max_iter = j.value("max_iter", d.max_iter);
  p.feature_fraction = j.value("feature_fraction", d.feature_fraction);
}

namespace {

using detail::GnbModel;
using detail::KnnModel;
using detail::LogisticModel;
using detail::TreeModel;
using detail::TreeNode;

// Column-projected copy of the training rows.
struct Design {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> x;  // row-major
  std::vector<int> y;

  double at(std::size_t r, std::size_t c) const { return x[r * dim + c]; }
};

Design project(const Dataset& data, const std::vector<std::size_t>& features) {
  Design d;
  d.n = data.size();
  d.dim = features.size();
  d.x.reserve(d.n * d.dim);
  d.y.reserve(d.n);
  for (const auto& row : data.rows()) {
    for (auto f : features) d.x.push_back(row.features[f]);
    d.y.push_back(row.label);
  }
  return d;
}

class TreeBuilder {
 public:
  TreeBuilder(const Design& d, std::span<const double> w, int max_depth)
      : d_(d), w_(w), max_depth_(max_depth) {}

  TreeModel build() {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < d_.n; ++i)
      if (w_[i] > 0.0) idx.push_back(i);
    grow(idx, 0);
    return std::move(model_);
  }

 private:
  static double gini(double wp, double wn) {
    double t = wp + wn;
    if (t <= 0.0) return 0.0;
    double p = wp / t;
    return 2.0 * t * p * (1.0 - p);  // weight-scaled impurity
  }

  int grow(std::vector<std::size_t>& idx, int depth) {
    double wp = 0.0, wn = 0.0;
    for (auto i : idx) (d_.y[i] > 0 ? wp : wn) += w_[i];
    int node_id = static_cast<int>(model_.nodes.size());
    model_.nodes.push_back(TreeNode{.label = wp >= wn ? 1 : -1});
    if (depth >= max_depth_ || wp <= 0.0 || wn <= 0.0) return node_id;

    double parent = gini(wp, wn);
    double best_gain = 1e-12 * (wp + wn);
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> order = idx;
    for (std::size_t f = 0; f < d_.dim; ++f) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double va = d_.at(a, f), vb = d_.at(b, f);
        return va < vb || (va == vb && a < b);
      });
      double lp = 0.0, ln = 0.0;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        auto i = order[k];
        (d_.y[i] > 0 ? lp : ln) += w_[i];
        double v = d_.at(i, f), next = d_.at(order[k + 1], f);
        if (v == next) continue;
        double gain = parent - gini(lp, ln) - gini(wp - lp, wn - ln);
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (v + next);
        }
      }
    }
    if (best_feature < 0) return node_id;

    std::vector<std::size_t> left, right;
    for (auto i : idx)
      (d_.at(i, static_cast<std::size_t>(best_feature)) <= best_threshold ? left : right)
          .push_back(i);
    idx.clear();
    idx.shrink_to_fit();
    int l = grow(left, depth + 1);
    int r = grow(right, depth + 1);
    auto& node = model_.nodes[static_cast<std::size_t>(node_id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return node_id;
  }

  const Design& d_;
  std::span<const double> w_;
  int max_depth_;
  TreeModel model_;
};

KnnModel fit_knn(const Design& d, std::span<const double> w, int k, bool uniform, Rng& rng) {
  if (k < 1) throw std::invalid_argument("knn: k must be >= 1");
  if (static_cast<std::size_t>(k) > d.n) {
    throw std::invalid_argument("knn: k (" + std::to_string(k) + ") exceeds row count (" +
                                std::to_string(d.n) + ")");
  }
  KnnModel m;
  m.k = k;
  m.dim = d.dim;
  if (uniform) {
    m.points = d.x;
    m.labels = d.y;
    return m;
  }
  std::discrete_distribution<std::size_t> draw(w.begin(), w.end());
  m.points.reserve(d.n * d.dim);
  m.labels.reserve(d.n);
  for (std::size_t s = 0; s < d.n; ++s) {
    auto r = draw(rng);
    for (std::size_t c = 0; c < d.dim; ++c) m.points.push_back(d.at(r, c));
    m.labels.push_back(d.y[r]);
  }
  return m;
}

GnbModel fit_gnb(const Design& d, std::span<const double> w) {
  GnbModel m;
  double total[2] = {0.0, 0.0};
  for (int c = 0; c < 2; ++c) {
    m.mean[c].assign(d.dim, 0.0);
    m.var[c].assign(d.dim, 0.0);
  }
  for (std::size_t i = 0; i < d.n; ++i) {
    int c = d.y[i] > 0 ? 1 : 0;
    total[c] += w[i];
    for (std::size_t f = 0; f < d.dim; ++f) m.mean[c][f] += w[i] * d.at(i, f);
  }
  for (int c = 0; c < 2; ++c)
    for (auto& v : m.mean[c]) v /= total[c];
  double max_var = 0.0;
  for (std::size_t i = 0; i < d.n; ++i) {
    int c = d.y[i] > 0 ? 1 : 0;
    for (std::size_t f = 0; f < d.dim; ++f) {
      double dx = d.at(i, f) - m.mean[c][f];
      m.var[c][f] += w[i] * dx * dx;
    }
  }
  for (int c = 0; c < 2; ++c)
    for (auto& v : m.var[c]) {
      v /= total[c];
      max_var = std::max(max_var, v);
    }
  double smoothing = 1e-9 * std::max(max_var, 1e-300);
  for (int c = 0; c < 2; ++c)
    for (auto& v : m.var[c]) v += smoothing;
  double all = total[0] + total[1];
  m.log_prior[0] = std::log(total[0] / all);
  m.log_prior[1] = std::log(total[1] / all);
  return m;
}

LogisticModel fit_logistic(const Design& d, std::span<const double> w, double l2, int max_iter) {
  const auto n = static_cast<Eigen::Index>(d.n);
  const auto p = static_cast<Eigen::Index>(d.dim) + 1;
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n), sw(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c + 1 < p; ++c)
      X(i, c) = d.at(static_cast<std::size_t>(i), static_cast<std::size_t>(c));
    X(i, p - 1) = 1.0;
    y(i) = d.y[static_cast<std::size_t>(i)] > 0 ? 1.0 : 0.0;
    sw(i) = w[static_cast<std::size_t>(i)] * static_cast<double>(n);
  }
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd ridge = Eigen::VectorXd::Constant(p, l2 * static_cast<double>(n));
  ridge(p - 1) = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd eta = X * beta;
    Eigen::VectorXd mu = eta.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    Eigen::VectorXd grad = X.transpose() * (sw.cwiseProduct(mu - y)) + ridge.cwiseProduct(beta);
    Eigen::VectorXd curv = sw.cwiseProduct(mu.cwiseProduct(Eigen::VectorXd::Ones(n) - mu));
    Eigen::MatrixXd hess = X.transpose() * curv.asDiagonal() * X;
    hess.diagonal() += ridge;
    hess.diagonal().array() += 1e-10;
    Eigen::VectorXd step = hess.ldlt().solve(grad);
    beta -= step;
    if (step.norm() < 1e-10 * (1.0 + beta.norm())) break;
  }
  LogisticModel m;
  m.coef.assign(beta.data(), beta.data() + p - 1);
  m.bias = beta(p - 1);
  return m;
}

bool is_uniform(std::span<const double> w) {
  auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  return *hi - *lo <= 1e-12 * *hi;
}

int predict_tree(const TreeModel& m, std::span<const double> x) {
  std::size_t id = 0;
  while (true) {
    const auto& node = m.nodes[id];
    if (node.feature < 0) return node.label;
    id = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold
                                      ? node.left
                                      : node.right);
  }
}

int predict_knn(const KnnModel& m, std::span<const double> x) {
  std::size_t n = m.labels.size();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double* p = m.points.data() + r * m.dim;
    double s = 0.0;
    for (std::size_t c = 0; c < m.dim; ++c) {
      double dx = p[c] - x[c];
      s += dx * dx;
    }
    dist[r] = {s, r};
  }
  auto k = static_cast<std::size_t>(m.k);
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
  int vote = 0;
  for (std::size_t i = 0; i < k; ++i) vote += m.labels[dist[i].second];
  return vote >= 0 ? 1 : -1;
}

int predict_gnb(const GnbModel& m, std::span<const double> x) {
  double score[2];
  for (int c = 0; c < 2; ++c) {
    double s = m.log_prior[c];
    for (std::size_t f = 0; f < x.size(); ++f) {
      double dx = x[f] - m.mean[c][f];
      s -= 0.5 * std::log(2.0 * 3.141592653589793 * m.var[c][f]) + 0.5 * dx * dx / m.var[c][f];
    }
    score[c] = s;
  }
  return score[1] >= score[0] ? 1 : -1;
}

int predict_logistic(const LogisticModel& m, std::span<const double> x) {
  double s = m.bias;
  for (std::size_t f = 0; f < x.size(); ++f) s += m.coef[f] * x[f];
  return s >= 0.0 ? 1 : -1;
}

}  // namespace

int WeakLearner::predict(std::span<const double> x) const {
  if (x.size() != n_features_) {
    throw std::invalid_argument("learner expects " + std::to_string(n_features_) +
                                " features, got " + std::to_string(x.size()));
  }
  if (constant_) return *constant_;
  std::vector<double> sub;
  sub.reserve(features_.size());
  for (auto f : features_) sub.push_back(x[f]);
  return std::visit(
      [&](const auto& m) -> int {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, TreeModel>) return predict_tree(m, sub);
        else if constexpr (std::is_same_v<M, KnnModel>) return predict_knn(m, sub);
        else if constexpr (std::is_same_v<M, GnbModel>) return predict_gnb(m, sub);
        else return predict_logistic(m, sub);
      },
      model_);
}

WeakLearner fit(LearnerKind kind, const Dataset& data, std::span<const double> sample_weights,
                const LearnerParams& params, std::uint64_t seed) {
  if (data.empty()) throw std::invalid_argument("fit: empty training data");
  if (sample_weights.size() != data.size()) {
    throw std::invalid_argument("fit: weight vector length does not match row count");
  }
  double total = 0.0;
  for (double w : sample_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("fit: weights must be finite and >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-6) throw std::invalid_argument("fit: weights must sum to 1");
  if (!(params.feature_fraction > 0.0 && params.feature_fraction <= 1.0)) {
    throw std::invalid_argument("fit: feature_fraction must lie in (0, 1]");
  }

  Rng rng = make_rng(seed, "learner-fit");
  WeakLearner learner;
  learner.kind_ = kind;
  learner.n_features_ = data.n_features();
  learner.features_.resize(data.n_features());
  std::iota(learner.features_.begin(), learner.features_.end(), 0);
  if (params.feature_fraction < 1.0) {
    auto m = static_cast<std::size_t>(
        std::llround(params.feature_fraction * static_cast<double>(data.n_features())));
    m = std::clamp<std::size_t>(m, 1, data.n_features());
    std::shuffle(learner.features_.begin(), learner.features_.end(), rng);
    learner.features_.resize(m);
    std::sort(learner.features_.begin(), learner.features_.end());
  }

  Design design = project(data, learner.features_);
  double wp = 0.0, wn = 0.0;
  for (std::size_t i = 0; i < design.n; ++i) (design.y[i] > 0 ? wp : wn) += sample_weights[i];
  if (wp <= 0.0 || wn <= 0.0) {
    if (kind == LearnerKind::knn && static_cast<std::size_t>(params.k) > data.size()) {
      throw std::invalid_argument("knn: k exceeds row count");
    }
    learner.constant_ = wp > 0.0 ? 1 : -1;
    learner.model_ = TreeModel{{TreeNode{.label = *learner.constant_}}};
    return learner;
  }

  switch (kind) {
    case LearnerKind::decision_tree:
      learner.model_ = TreeBuilder(design, sample_weights, params.max_depth).build();
      break;
    case LearnerKind::knn:
      learner.model_ = fit_knn(design, sample_weights, params.k, is_uniform(sample_weights), rng);
      break;
    case LearnerKind::gaussian_nb:
      learner.model_ = fit_gnb(design, sample_weights);
      break;
    case LearnerKind::logistic_regression:
      learner.model_ = fit_logistic(design, sample_weights, params.l2, params.max_iter);
      break;
  }
  return learner;
}

void to_json(Json& j, const WeakLearner& l) {
  j = Json{{"kind", to_string(l.kind_)}, {"n_features", l.n_features_}, {"features", l.features_}};
  if (l.constant_) {
    j["constant"] = *l.constant_;
    return;
  }
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, TreeModel>) {
          Json nodes = Json::array();
          for (const auto& n : m.nodes)
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.label});
          j["nodes"] = nodes;
        } else if constexpr (std::is_same_v<M, KnnModel>) {
          j["k"] = m.k;
          j["dim"] = m.dim;
          j["points"] = m.points;
          j["labels"] = m.labels;
        } else if constexpr (std::is_same_v<M, GnbModel>) {
          j["mean"] = {m.mean[0], m.mean[1]};
          j["var"] = {m.var[0], m.var[1]};
          j["log_prior"] = {m.log_prior[0], m.log_prior[1]};
        } else {
          j["coef"] = m.coef;
          j["bias"] = m.bias;
        }
      },
      l.model_);
}

void from_json(const Json& j, WeakLearner& l) {
  l.kind_ = learner_kind_from_string(j.at("kind").get<std::string>());
  l.n_features_ = j.at("n_features").get<std::size_t>();
  l.features_ = j.at("features").get<std::vector<std::size_t>>();
  for (auto f : l.features_)
    if (f >= l.n_features_) throw std::runtime_error("learner feature index out of range");
  l.constant_.reset();
  if (j.contains("constant")) {
    l.constant_ = j.at("constant").get<int>();
    l.model_ = TreeModel{{TreeNode{.label = *l.constant_}}};
    return;
  }
  switch (l.kind_) {
    case LearnerKind::decision_tree: {
      TreeModel m;
      for (const auto& n : j.at("nodes")) {
        m.nodes.push_back(TreeNode{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                                   n.at(3).get<int>(), n.at(4).get<int>()});
      }
      l.model_ = std::move(m);
      break;
    }
    case LearnerKind::knn: {
      KnnModel m;
      m.k = j.at("k").get<int>();
      m.dim = j.at("dim").get<std::size_t>();
      m.points = j.at("points").get<std::vector<double>>();
      m.labels = j.at("labels").get<std::vector<int>>();
      l.model_ = std::move(m);
      break;
    }
    case LearnerKind::gaussian_nb: {
      GnbModel m;
      for (int c = 0; c < 2; ++c) {
        m.mean[c] = j.at("mean").at(c).get<std::vector<double>>();
        m.var[c] = j.at("var").at(c).get<std::vector<double>>();
        m.log_prior[c] = j.at("log_prior").at(c).get<double>();
      }
      l.model_ = std::move(m);
      break;
    }
    case LearnerKind::logistic_regression: {
      LogisticModel m;
      m.coef = j.at("coef").get<std::vector<double>>();
      m.bias = j.at("bias").get<double>();
      l.model_ = std::move(m);
      break;
    }
  }
}

PredictionMatrix predict_matrix(std::span<const WeakLearner> ensemble, const Dataset& data) {
  if (ensemble.empty()) throw std::invalid_argument("predict_matrix: empty ensemble");
  PredictionMatrix h(ensemble.size(), data.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    if (ensemble[i].n_features() != data.n_features()) {
      throw std::invalid_argument("predict_matrix: learner " + std::to_string(i) + " expects " +
                                  std::to_string(ensemble[i].n_features()) +
                                  " features, data has " + std::to_string(data.n_features()));
    }
    for (std::size_t s = 0; s < data.size(); ++s) h.set(i, s, ensemble[i].predict(data[s].features));
  }
  return h;
}

BoostState BoostState::uniform(std::size_t n_samples) {
  BoostState st;
  st.distribution.assign(n_samples, 1.0 / static_cast<double>(n_samples));
  return st;
}

BoostState boost_step(std::span<const std::int8_t> predictions, std::span<const int> labels,
                      const BoostState& state) {
  const auto& d = state.distribution;
  if (predictions.size() != labels.size() || d.size() != labels.size()) {
    throw std::invalid_argument("boost_step: length mismatch");
  }
  double eps = 0.0;
  for (std::size_t s = 0; s < d.size(); ++s)
    if (predictions[s] != labels[s]) eps += d[s] * std::abs(static_cast<double>(predictions[s]));
  eps = std::clamp(eps, kEpsilonFloor, 1.0 - kEpsilonFloor);
  double w = 0.5 * std::log((1.0 - eps) / eps);

  BoostState next = state;
  double z = 0.0;
  for (std::size_t s = 0; s < d.size(); ++s) {
    next.distribution[s] = d[s] * std::exp(-w * labels[s] * predictions[s]);
    z += next.distribution[s];
  }
  for (auto& v : next.distribution) v /= z;
  next.epsilons.push_back(eps);
  next.real_weights.push_back(w);
  next.normalizers.push_back(z);
  return next;
}

void EnsembleConfig::validate() const {
  if (n_learners < 1) throw std::invalid_argument("ensemble: n_learners must be >= 1");
  if (n_subsets < 1) throw std::invalid_argument("ensemble: n_subsets must be >= 1");
  if (mix.empty()) throw std::invalid_argument("ensemble: mix must not be empty");
  double total = 0.0;
  for (const auto& [_, f] : mix) {
    if (!(f >= 0.0)) throw std::invalid_argument("ensemble: mix fractions must be >= 0");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("ensemble: mix fractions must sum to 1");
}

void to_json(Json& j, const EnsembleConfig& c) {
  Json mix = Json::object();
  for (const auto& [k, f] : c.mix) mix[to_string(k)] = f;
  j = Json{{"n_learners", c.n_learners}, {"mix", mix},
           {"variant", to_string(c.variant)}, {"n_subsets", c.n_subsets},
           {"params", c.params}, {"seed", c.seed}};
}

void from_json(const Json& j, EnsembleConfig& c) {
  reject_unknown_keys(j, {"n_learners", "mix", "variant", "n_subsets", "params", "seed"},
                      "ensemble config");
  EnsembleConfig d;
  c.n_learners = j.value("n_learners", d.n_learners);
  if (j.contains("mix")) {
    c.mix.clear();
    for (const auto& [k, v] : j.at("mix").items())
      c.mix.emplace_back(learner_kind_from_string(k), v.get<double>());
  } else {
    c.mix = d.mix;
  }
  c.variant = j.contains("variant")
                  ? ensemble_variant_from_string(j.at("variant").get<std::string>())
                  : d.variant;
  c.n_subsets = j.value("n_subsets", d.n_subsets);
  c.params = d.params;
  if (j.contains("params")) from_json(j.at("params"), c.params);
  c.seed = j.value("seed", d.seed);
  c.validate();
}

std::vector<LearnerKind> expand_mix(const EnsembleConfig& config) {
  config.validate();
  const std::size_t n = config.n_learners;
  std::vector<std::size_t> counts(config.mix.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < config.mix.size(); ++k) {
    double exact = config.mix[k].second * static_cast<double>(n);
    counts[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    assigned += counts[k];
    remainders.emplace_back(-(exact - static_cast<double>(counts[k])), k);
  }
  std::stable_sort(remainders.begin(), remainders.end());
  for (std::size_t r = 0; assigned < n; ++r, ++assigned) ++counts[remainders[r % remainders.size()].second];

  // Interleave: the j-th learner of kind k sits at position (j + 0.5) / count_k.
  std::vector<std::tuple<double, std::size_t, LearnerKind>> slots;
  for (std::size_t k = 0; k < counts.size(); ++k)
    for (std::size_t j = 0; j < counts[k]; ++j)
      slots.emplace_back((static_cast<double>(j) + 0.5) / static_cast<double>(counts[k]), k,
                         config.mix[k].first);
  std::sort(slots.begin(), slots.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) < std::get<0>(b) ||
           (std::get<0>(a) == std::get<0>(b) && std::get<1>(a) < std::get<1>(b));
  });
  std::vector<LearnerKind> kinds;
  for (const auto& s : slots) kinds.push_back(std::get<2>(s));
  return kinds;
}

Ensemble train_ensemble(const EnsembleConfig& config, const Dataset& train) {
  config.validate();
  auto kinds = expand_mix(config);
  const std::size_t n = config.n_learners;
  const std::size_t n_subsets = std::min(config.n_subsets, n);
  auto subsets = temporal_subsample(train, n_subsets);

  Ensemble out;
  out.learners.reserve(n);
  for (std::size_t s = 0; s < n_subsets; ++s) {
    std::size_t begin = s * n / n_subsets, end = (s + 1) * n / n_subsets;
    const Dataset& part = subsets[s];
    auto labels = part.labels();
    BoostState state = BoostState::uniform(part.size());
    for (std::size_t i = begin; i < end; ++i) {
      auto seed = derive_seed(config.seed, "learner", i);
      WeakLearner l = fit(kinds[i], part, state.distribution, config.params, seed);
      if (config.variant == EnsembleVariant::boosting && i + 1 < end) {
        PredictionMatrix row = predict_matrix(std::span(&l, 1), part);
        state = boost_step(row.row(0), labels, state);
      }
      out.learners.push_back(std::move(l));
      out.subset_of.push_back(s);
    }
  }
  out.predictions = predict_matrix(out.learners, train);
  return out;
}

}  // namespace qboost
