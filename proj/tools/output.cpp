#include "output.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <Eigen/Core>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include "config.hpp"

namespace qboost::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

RunOutput::RunOutput(std::filesystem::path dir, std::string command, const Json& effective_config, std::uint64_t seed)
    : dir_(std::move(dir)), command_(std::move(command)), config_(effective_config), seed_(seed) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_)) {
    throw std::runtime_error("cannot create output directory " + dir_.string());
  }
}

void RunOutput::json(const std::string& name, const Json& j) {
  write_json_file(path(name), j);
  record(name);
}

void RunOutput::csv(const std::string& name, const CsvTable& t) {
  write_csv(path(name), t);
  record(name);
}

void RunOutput::record(const std::string& name) {
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
}

void RunOutput::stage(const std::string& name, const std::function<void()>& body) {
  spdlog::info("stage {}: start", name);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body();
  } catch (const std::exception& e) {
    throw std::runtime_error("stage " + name + ": " + e.what());
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  timings_.emplace_back(name, s);
  spdlog::info("stage {}: done in {:.3f} s", name, s);
}

void RunOutput::finish() {
  Json outputs = Json::object();
  for (const auto& f : files_) outputs[f] = sha256_file(path(f));
  Json manifest = {
      {"program", "qboost_cli"},
      {"version", kVersion},
      {"command", command_},
      {"seed", seed_},
      {"config_sha256", sha256_hex(config_.dump())},
      {"config", config_},
      {"build", {{"compiler", __VERSION__},
                 {"cxx_standard", __cplusplus},
                 {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                               std::to_string(EIGEN_MINOR_VERSION)}}},
      {"outputs", outputs},
  };
  write_json_file(path("manifest.json"), manifest);

  std::ofstream t(path("timings.txt"), std::ios::binary);
  for (const auto& [name, s] : timings_) t << name << ' ' << std::fixed << std::setprecision(6) << s << '\n';
}

}  // namespace qboost::cli
