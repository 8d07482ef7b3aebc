#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qboost/io.hpp"

namespace qboost::cli {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

// Output directory of one run. Every file written through it is listed with
// its digest in the manifest; wall-clock timings go to timings.txt, outside
// the reproducible outputs.
class RunOutput {
 public:
  RunOutput(std::filesystem::path dir, std::string command, const Json& effective_config, std::uint64_t seed);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }

  void json(const std::string& name, const Json& j);
  void csv(const std::string& name, const CsvTable& t);
  // Registers a file written by other code.
  void record(const std::string& name);

  // Runs `body` as a named stage: its wall time is logged and errors are
  // rethrown prefixed with the stage name.
  void stage(const std::string& name, const std::function<void()>& body);

  void finish();

 private:
  std::filesystem::path dir_;
  std::string command_;
  Json config_;
  std::uint64_t seed_;
  std::vector<std::string> files_;
  std::vector<std::pair<std::string, double>> timings_;
};

}  // namespace qboost::cli
