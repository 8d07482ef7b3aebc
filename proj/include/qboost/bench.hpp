#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qboost/io.hpp"
#include "qboost/qubo.hpp"
#include "qboost/trace.hpp"

namespace qboost {

struct GapSeries {
  std::vector<double> mean;  // per cycle, across instances
  std::vector<double> stddev;  // sample standard deviation (0 for one trace)
  bool truncated = false;      // traces had different lengths
};

// Best-gap-vs-cycle statistics over one trace per instance. Cycles before a
// trace's first scored record count as gap +inf and make the mean infinite.
GapSeries gap_convergence(std::span<const SolveTrace> traces, std::span<const double> reference_costs);

// First cycle (1-based) with best gap strictly below threshold.
std::optional<std::size_t> cycles_to_gap(std::span<const double> best_gaps, double threshold = 0.01);
std::optional<std::size_t> cycles_to_gap(const SolveTrace& trace, double reference_cost, double threshold = 0.01);

enum class ScalingModel { power_law, exponential };
std::string to_string(ScalingModel m);

// power_law: cycles = a N^b; exponential: cycles = a e^{b N}.
struct ScalingFit {
  ScalingModel model = ScalingModel::power_law;
  double a = 0.0;
  double b = 0.0;
  double r_squared = 0.0;
  double other_r_squared = 0.0;  // the rejected model
  std::vector<std::pair<double, double>> points;
};

ScalingFit fit_scaling(std::span<const std::pair<double, double>> points);

// Expected number of uniform draws until a bitstring with gap below the
// threshold appears, 1 / P(gap < threshold), by an exact pruned count of the
// near-optimal bitstrings (N <= min(cap, 62)).
double uniform_expected_cycles(const QuboMatrix& q, double reference_cost, double threshold = 0.01,
                               std::size_t cap = 32);

// Fraction of all 2^N bitstrings with a strictly lower cost, for each given
// cost, by exhaustive enumeration (N <= kBruteForceCap).
std::vector<double> rank_fractions(const QuboMatrix& q, std::span<const double> costs);

CsvTable gap_series_csv(const GapSeries& s);
void to_json(Json& j, const ScalingFit& f);

}  // namespace qboost
