#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
  using namespace qboost::cli;
  CLI::App app{"QBoost ensemble training and QUBO solving"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonOptions opts;
  std::uint64_t seed = 0;
  std::string solver;
  std::string log_level = "info";
  std::filesystem::path qubo_path;
  std::filesystem::path run_dir;
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, critical or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

  auto add_common = [&](CLI::App* sub, bool with_solver) {
    sub->add_option("--config", opts.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "global seed (overrides the configuration)");
    sub->add_option("--out", opts.out, "output directory")->capture_default_str();
    if (with_solver) {
      sub->add_option("--solver", solver, "solver name (overrides the configuration)")
          ->check(CLI::IsMember(solver_names()));
    }
  };
  auto* gen = app.add_subcommand("gen-data", "write a synthetic train/test split");
  add_common(gen, false);
  auto* train = app.add_subcommand("train", "train an ensemble, solve its QUBO and evaluate the classifier");
  add_common(train, true);
  train->get_option("--config")->required();
  auto* solve = app.add_subcommand("solve", "solve a QUBO file");
  add_common(solve, true);
  solve->add_option("--qubo", qubo_path, "QUBO JSON file")->check(CLI::ExistingFile);
  auto* bench = app.add_subcommand("bench", "gap convergence and scaling benchmark");
  add_common(bench, true);
  auto* report = app.add_subcommand("report", "summarize a finished run directory");
  report->add_option("run_dir", run_dir, "output directory of a previous run")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("qboost");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(log_level));

  for (auto* sub : {gen, train, solve, bench}) {
    if (sub->parsed() && sub->count("--seed")) opts.seed = seed;
    if (sub->parsed() && sub != gen && sub->count("--solver")) opts.solver = solver;
  }
  try {
    if (gen->parsed()) cmd_gen_data(opts);
    if (train->parsed()) cmd_train(opts);
    if (solve->parsed()) cmd_solve(opts, qubo_path);
    if (bench->parsed()) cmd_bench(opts);
    if (report->parsed()) cmd_report(run_dir);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
