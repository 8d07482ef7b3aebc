#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qboost {

using Json = nlohmann::json;

// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

// Minimal RFC-4180-ish CSV: comma separated, no quoting of numeric cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Parses JSON from a file. Syntax errors are rethrown as std::runtime_error
// carrying the line and column of the offending byte.
Json read_json_file(const std::filesystem::path& path);
Json parse_json_text(std::string_view text, std::string_view origin);
void write_json_file(const std::filesystem::path& path, const Json& j);

// Throws if `j` carries keys outside `allowed`.
void reject_unknown_keys(const Json& j, const std::vector<std::string>& allowed,
                         std::string_view context);

}  // namespace qboost
