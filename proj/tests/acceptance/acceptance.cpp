#include <chrono>
#include <cstdio>
#include <exception>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "criteria.hpp"

int main(int argc, char** argv) {
  using namespace qboost::acceptance;
  CLI::App app{"Acceptance criteria; one PASS/FAIL line per criterion"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion number (repeatable); all when omitted")
      ->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  const std::set<int> wanted(selected.begin(), selected.end());

  bool all_pass = true;
  for (const auto& c : all_criteria()) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d [%s]: %s (%.1f s) %s\n", c.id, c.name.c_str(), o.pass ? "PASS" : "FAIL", s,
                o.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
