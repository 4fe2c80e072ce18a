#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace consist {

/// The engine is fully specified by the standard, so streams are portable.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// 64-bit seed for the stream keyed by `key` under `master_seed`.
std::uint64_t mix_seed(std::uint64_t master_seed, std::string_view key);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(Rng& rng);

/// Uniform integer in [0, bound), bound > 0, by rejection (no modulo bias).
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

}  // namespace consist
