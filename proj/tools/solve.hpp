#pragma once

#include <cstdint>
#include <memory>

#include "config.hpp"
#include "qboost/qubo.hpp"
#include "qboost/trace.hpp"

namespace qboost::cli {

struct SolveOutcome {
  Bitstring best;
  double cost = 0.0;
  SolveTrace trace;
  Json details = Json::object();
};

// Runs the named solver; `cache` lets repeated RGS runs share cluster
// evolutions.
SolveOutcome run_solver(const QuboMatrix& q, const std::string& name, const SolverSettings& s, std::uint64_t seed,
                        std::shared_ptr<ClusterCache> cache = nullptr);

}  // namespace qboost::cli
