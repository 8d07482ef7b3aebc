#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qboost {

using Rng = std::mt19937_64;

// Seeds for named substreams. Every random draw in the library flows from a
// base seed through derive_seed, so independent stages (loading, sampling,
// relabeling, ...) never share a generator and can run in any order.
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream,
                          std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t base, std::string_view stream,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(base, stream, index));
}

}  // namespace qboost
