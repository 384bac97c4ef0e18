#pragma once

// Reproducible random streams for replicated simulation.
//
// Every replication gets its own std::mt19937_64 whose seed is derived from
// (master seed, cell key, replication index) through SplitMix64 mixing, so
// replications can run in any order on any thread and still see the same
// numbers.

#include <cstdint>
#include <random>
#include <string_view>

namespace wlt {

using Engine = std::mt19937_64;

/// Identity of the stream derivation; bump when the scheme changes.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64+splitmix64-v1";

std::uint64_t splitmix64(std::uint64_t& state);

/// 64-bit FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t fnv1a64(std::string_view text);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t key, std::uint64_t index);

Engine make_stream(std::uint64_t master, std::uint64_t key, std::uint64_t index);

} // namespace wlt
