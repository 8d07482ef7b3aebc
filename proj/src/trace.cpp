#include "qboost/trace.hpp"

namespace qboost {

void SolveTrace::push(std::size_t atom_count, std::optional<Bitstring> w, std::optional<double> c) {
  CycleRecord r;
  r.cycle = records_.size() + 1;
  r.atom_count = atom_count;
  r.bitstring = std::move(w);
  r.cost = c;
  if (c) {
    // Strict improvement only: the first bitstring reaching the best cost is kept.
    if (!best_index_ || *c < *records_[*best_index_].cost) best_index_ = records_.size();
  }
  if (best_index_) r.best_cost = (*best_index_ == records_.size()) ? *c : *records_[*best_index_].cost;
  records_.push_back(std::move(r));
}

std::optional<double> SolveTrace::best_cost() const {
  if (!best_index_) return std::nullopt;
  return records_[*best_index_].cost;
}

std::optional<Bitstring> SolveTrace::best_bitstring() const {
  if (!best_index_) return std::nullopt;
  return records_[*best_index_].bitstring;
}

std::vector<std::optional<double>> SolveTrace::best_costs() const {
  std::vector<std::optional<double>> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.best_cost);
  return out;
}

std::vector<Bitstring> SolveTrace::sampled() const {
  std::vector<Bitstring> out;
  for (const auto& r : records_) {
    if (r.bitstring) out.push_back(*r.bitstring);
  }
  return out;
}

CsvTable SolveTrace::to_csv(std::optional<double> reference_cost) const {
  CsvTable t;
  t.header = {"cycle", "atom_count", "cost", "best_cost", "gap", "bitstring"};
  for (const auto& r : records_) {
    std::vector<std::string> row;
    row.push_back(std::to_string(r.cycle));
    row.push_back(std::to_string(r.atom_count));
    row.push_back(r.cost ? format_double(*r.cost) : "");
    row.push_back(r.best_cost ? format_double(*r.best_cost) : "");
    row.push_back(r.best_cost && reference_cost ? format_double(gap_from_costs(*r.best_cost, *reference_cost))
                                                : "");
    row.push_back(r.bitstring ? r.bitstring->to_string() : "");
    t.rows.push_back(std::move(row));
  }
  return t;
}

void SolveTrace::write_csv(const std::filesystem::path& path, std::optional<double> reference_cost) const {
  qboost::write_csv(path, to_csv(reference_cost));
}

}  // namespace qboost
