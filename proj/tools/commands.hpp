#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace qboost::cli {

struct CommonOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "out";
  std::optional<std::string> solver;
};

void cmd_gen_data(const CommonOptions& o);
void cmd_train(const CommonOptions& o);
void cmd_solve(const CommonOptions& o, const std::filesystem::path& qubo_path);
void cmd_bench(const CommonOptions& o);
// Prints a summary of a finished run directory to stdout.
void cmd_report(const std::filesystem::path& run_dir);

}  // namespace qboost::cli
