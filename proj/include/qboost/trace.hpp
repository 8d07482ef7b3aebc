#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qboost/io.hpp"
#include "qboost/qubo.hpp"

namespace qboost {

// One repetition of a sampling solver. Cycles whose register size differs
// from the QUBO size carry no bitstring and no cost.
struct CycleRecord {
  std::size_t cycle = 0;  // 1-based
  std::size_t atom_count = 0;
  std::optional<Bitstring> bitstring;
  std::optional<double> cost;
  std::optional<double> best_cost;  // best over cycles 1..cycle
};

class SolveTrace {
 public:
  SolveTrace() = default;
  SolveTrace(std::string solver, std::uint64_t seed) : solver_(std::move(solver)), seed_(seed) {}

  const std::string& solver() const { return solver_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<CycleRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  // Appends the next cycle; scored cycles update the running best.
  void push(std::size_t atom_count, std::optional<Bitstring> w, std::optional<double> c);
  void push_scored(const Bitstring& w, double c) { push(w.size(), w, c); }

  std::optional<double> best_cost() const;
  std::optional<Bitstring> best_bitstring() const;
  // Best cost after each cycle (absent until the first scored cycle).
  std::vector<std::optional<double>> best_costs() const;
  std::vector<Bitstring> sampled() const;

  // Columns: cycle, atom_count, cost, best_cost, gap, bitstring. gap is
  // relative to `reference_cost` and left empty without one.
  CsvTable to_csv(std::optional<double> reference_cost = std::nullopt) const;
  void write_csv(const std::filesystem::path& path,
                 std::optional<double> reference_cost = std::nullopt) const;

 private:
  std::string solver_;
  std::uint64_t seed_ = 0;
  std::vector<CycleRecord> records_;
  std::optional<std::size_t> best_index_;
};

}  // namespace qboost
