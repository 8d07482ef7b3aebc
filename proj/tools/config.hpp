#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qboost/dataset.hpp"
#include "qboost/io.hpp"
#include "qboost/learners.hpp"
#include "qboost/rgs.hpp"
#include "qboost/solvers.hpp"

namespace qboost::cli {

inline constexpr const char* kVersion = "1.0.0";

struct RgsSettings {
  std::size_t n_cycles = 1000;
  double p = 0.55;
  LoadingMode loading = LoadingMode::binomial;
  double u_over_omega = 3.0;  // nearest-neighbour interaction over the peak drive
  std::size_t cluster_cap = 14;
  bool relabel = true;
  std::size_t relabel_iters = 0;
  PulseShape pulse;

  double spacing() const { return spacing_for_interaction(u_over_omega * pulse.omega_max); }
};

struct QaoaSettings {
  std::size_t n_outer = 10;
  std::size_t shots_per_iter = 100;
  double p = 0.55;
  double u_over_omega = 3.0;
  double step = 0.5;
  PulseShape pulse;
};

struct TebdSettings {
  std::size_t chi = 16;
  double tau = 0.05;  // in units of 1 / max|Q_ij|
  std::size_t n_steps = 30;
};

struct SolverSettings {
  std::string name = "brute_force";  // brute_force, uniform, sa, rgs, qaoa, tebd
  std::size_t uniform_cycles = 1000;
  SaSchedule sa;
  std::size_t sa_restarts = 20;
  RgsSettings rgs;
  QaoaSettings qaoa;
  TebdSettings tebd;
};

std::vector<std::string> solver_names();

struct DataSettings {
  std::optional<SyntheticSpec> synthetic;
  std::filesystem::path train_csv;
  std::filesystem::path test_csv;
  std::string label_column = "label";
  std::string date_column = "date";
  std::string rebalance = "none";  // none, undersample, oversample
};

struct MetricsSettings {
  double recall_target = 0.83;
  std::size_t n_thresholds = 200;
};

// Lambda values are per training sample; the QUBO receives lambda * S.
struct TrainConfig {
  std::uint64_t seed = 0;
  DataSettings data;
  EnsembleConfig ensemble;
  std::optional<double> lambda;
  std::vector<double> lambda_grid;
  SolverSettings solver;
  MetricsSettings metrics;
};

struct SolveConfig {
  std::uint64_t seed = 0;
  std::filesystem::path qubo;
  SolverSettings solver;
};

struct BenchConfig {
  std::uint64_t seed = 0;
  std::vector<std::size_t> sizes = {12};
  std::size_t n_instances = 5;
  std::size_t n_cycles = 1000;
  std::vector<std::string> solvers = {"uniform", "sa", "rgs"};
  double threshold = 0.01;
  std::size_t uniform_exact_max_n = 32;  // exact uniform-sampling expectation up to this size
  SolverSettings settings;
};

void from_json(const Json& j, RgsSettings& s);
void from_json(const Json& j, QaoaSettings& s);
void from_json(const Json& j, TebdSettings& s);
void from_json(const Json& j, SolverSettings& s);
void from_json(const Json& j, DataSettings& s);
void from_json(const Json& j, MetricsSettings& s);
void from_json(const Json& j, TrainConfig& c);
void from_json(const Json& j, SolveConfig& c);
void from_json(const Json& j, BenchConfig& c);

void to_json(Json& j, const RgsSettings& s);
void to_json(Json& j, const QaoaSettings& s);
void to_json(Json& j, const TebdSettings& s);
void to_json(Json& j, const SolverSettings& s);

}  // namespace qboost::cli
