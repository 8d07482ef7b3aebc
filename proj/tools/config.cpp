#include "config.hpp"

#include <algorithm>
#include <stdexcept>

namespace qboost::cli {

std::vector<std::string> solver_names() { return {"brute_force", "uniform", "sa", "rgs", "qaoa", "tebd"}; }

namespace {

void check_solver_name(const std::string& name) {
  const auto names = solver_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw std::invalid_argument("unknown solver \"" + name + "\"");
  }
}

}  // namespace

void from_json(const Json& j, RgsSettings& s) {
  reject_unknown_keys(j, {"n_cycles", "p", "loading", "u_over_omega", "cluster_cap", "relabel", "relabel_iters", "pulse"},
                      "rgs settings");
  RgsSettings d;
  s.n_cycles = j.value("n_cycles", d.n_cycles);
  s.p = j.value("p", d.p);
  s.loading = loading_mode_from_string(j.value("loading", to_string(d.loading)));
  s.u_over_omega = j.value("u_over_omega", d.u_over_omega);
  s.cluster_cap = j.value("cluster_cap", d.cluster_cap);
  s.relabel = j.value("relabel", d.relabel);
  s.relabel_iters = j.value("relabel_iters", d.relabel_iters);
  s.pulse = j.contains("pulse") ? j.at("pulse").get<PulseShape>() : d.pulse;
  if (s.n_cycles == 0) throw std::invalid_argument("rgs settings: n_cycles must be positive");
  if (!(s.u_over_omega > 0.0)) throw std::invalid_argument("rgs settings: u_over_omega must be positive");
}

void to_json(Json& j, const RgsSettings& s) {
  j = Json{{"n_cycles", s.n_cycles},       {"p", s.p},
           {"loading", to_string(s.loading)}, {"u_over_omega", s.u_over_omega},
           {"cluster_cap", s.cluster_cap}, {"relabel", s.relabel},
           {"relabel_iters", s.relabel_iters}, {"pulse", s.pulse}};
}

void from_json(const Json& j, QaoaSettings& s) {
  reject_unknown_keys(j, {"n_outer", "shots_per_iter", "p", "u_over_omega", "step", "pulse"}, "qaoa settings");
  QaoaSettings d;
  s.n_outer = j.value("n_outer", d.n_outer);
  s.shots_per_iter = j.value("shots_per_iter", d.shots_per_iter);
  s.p = j.value("p", d.p);
  s.u_over_omega = j.value("u_over_omega", d.u_over_omega);
  s.step = j.value("step", d.step);
  s.pulse = j.contains("pulse") ? j.at("pulse").get<PulseShape>() : d.pulse;
}

void to_json(Json& j, const QaoaSettings& s) {
  j = Json{{"n_outer", s.n_outer}, {"shots_per_iter", s.shots_per_iter}, {"p", s.p},
           {"u_over_omega", s.u_over_omega}, {"step", s.step}, {"pulse", s.pulse}};
}

void from_json(const Json& j, TebdSettings& s) {
  reject_unknown_keys(j, {"chi", "tau", "n_steps"}, "tebd settings");
  TebdSettings d;
  s.chi = j.value("chi", d.chi);
  s.tau = j.value("tau", d.tau);
  s.n_steps = j.value("n_steps", d.n_steps);
}

void to_json(Json& j, const TebdSettings& s) { j = Json{{"chi", s.chi}, {"tau", s.tau}, {"n_steps", s.n_steps}}; }

void from_json(const Json& j, SolverSettings& s) {
  reject_unknown_keys(j, {"name", "uniform_cycles", "sa", "sa_restarts", "rgs", "qaoa", "tebd"}, "solver settings");
  SolverSettings d;
  s.name = j.value("name", d.name);
  check_solver_name(s.name);
  s.uniform_cycles = j.value("uniform_cycles", d.uniform_cycles);
  s.sa = j.contains("sa") ? j.at("sa").get<SaSchedule>() : d.sa;
  s.sa_restarts = j.value("sa_restarts", d.sa_restarts);
  s.rgs = j.contains("rgs") ? j.at("rgs").get<RgsSettings>() : d.rgs;
  s.qaoa = j.contains("qaoa") ? j.at("qaoa").get<QaoaSettings>() : d.qaoa;
  s.tebd = j.contains("tebd") ? j.at("tebd").get<TebdSettings>() : d.tebd;
}

void to_json(Json& j, const SolverSettings& s) {
  j = Json{{"name", s.name}, {"uniform_cycles", s.uniform_cycles}, {"sa", s.sa},    {"sa_restarts", s.sa_restarts},
           {"rgs", s.rgs},   {"qaoa", s.qaoa},                     {"tebd", s.tebd}};
}

void from_json(const Json& j, DataSettings& s) {
  reject_unknown_keys(j, {"synthetic", "train_csv", "test_csv", "label_column", "date_column", "rebalance"},
                      "data settings");
  DataSettings d;
  if (j.contains("synthetic")) s.synthetic = j.at("synthetic").get<SyntheticSpec>();
  s.train_csv = j.value("train_csv", std::string());
  s.test_csv = j.value("test_csv", std::string());
  s.label_column = j.value("label_column", d.label_column);
  s.date_column = j.value("date_column", d.date_column);
  s.rebalance = j.value("rebalance", d.rebalance);
  if (s.rebalance != "none" && s.rebalance != "undersample" && s.rebalance != "oversample") {
    throw std::invalid_argument("data settings: rebalance must be none, undersample or oversample");
  }
  const bool files = !s.train_csv.empty() || !s.test_csv.empty();
  if (s.synthetic.has_value() == files) {
    throw std::invalid_argument("data settings: give either \"synthetic\" or both \"train_csv\" and \"test_csv\"");
  }
  if (files && (s.train_csv.empty() || s.test_csv.empty())) {
    throw std::invalid_argument("data settings: both train_csv and test_csv are required");
  }
}

void from_json(const Json& j, MetricsSettings& s) {
  reject_unknown_keys(j, {"recall_target", "n_thresholds"}, "metrics settings");
  MetricsSettings d;
  s.recall_target = j.value("recall_target", d.recall_target);
  s.n_thresholds = j.value("n_thresholds", d.n_thresholds);
  if (!(s.recall_target > 0.0 && s.recall_target <= 1.0)) {
    throw std::invalid_argument("metrics settings: recall_target must lie in (0, 1]");
  }
}

void from_json(const Json& j, TrainConfig& c) {
  reject_unknown_keys(j, {"seed", "data", "ensemble", "lambda", "lambda_grid", "solver", "metrics"}, "train config");
  c = TrainConfig{};
  c.seed = j.value("seed", std::uint64_t{0});
  c.data = j.at("data").get<DataSettings>();
  if (j.contains("ensemble")) c.ensemble = j.at("ensemble").get<EnsembleConfig>();
  if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
  if (j.contains("lambda_grid")) c.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
  if (c.lambda && !c.lambda_grid.empty()) {
    throw std::invalid_argument("train config: give either lambda or lambda_grid, not both");
  }
  if (j.contains("solver")) c.solver = j.at("solver").get<SolverSettings>();
  if (j.contains("metrics")) c.metrics = j.at("metrics").get<MetricsSettings>();
}

void from_json(const Json& j, SolveConfig& c) {
  reject_unknown_keys(j, {"seed", "qubo", "solver"}, "solve config");
  c = SolveConfig{};
  c.seed = j.value("seed", std::uint64_t{0});
  c.qubo = j.value("qubo", std::string());
  if (j.contains("solver")) c.solver = j.at("solver").get<SolverSettings>();
}

void from_json(const Json& j, BenchConfig& c) {
  reject_unknown_keys(j, {"seed", "sizes", "n_instances", "n_cycles", "solvers", "threshold", "uniform_exact_max_n", "settings"},
                      "bench config");
  c = BenchConfig{};
  BenchConfig d;
  c.seed = j.value("seed", std::uint64_t{0});
  c.sizes = j.value("sizes", d.sizes);
  c.n_instances = j.value("n_instances", d.n_instances);
  c.n_cycles = j.value("n_cycles", d.n_cycles);
  c.solvers = j.value("solvers", d.solvers);
  c.threshold = j.value("threshold", d.threshold);
  c.uniform_exact_max_n = j.value("uniform_exact_max_n", d.uniform_exact_max_n);
  if (j.contains("settings")) c.settings = j.at("settings").get<SolverSettings>();
  if (c.sizes.empty()) throw std::invalid_argument("bench config: sizes must not be empty");
  if (c.uniform_exact_max_n > 62) throw std::invalid_argument("bench config: uniform_exact_max_n must be at most 62");
  if (c.n_instances == 0 || c.n_cycles == 0) {
    throw std::invalid_argument("bench config: n_instances and n_cycles must be positive");
  }
  for (const auto& s : c.solvers) {
    check_solver_name(s);
    if (s == "brute_force" || s == "tebd") {
      throw std::invalid_argument("bench config: solver \"" + s + "\" is not a sampling solver");
    }
  }
}

}  // namespace qboost::cli
