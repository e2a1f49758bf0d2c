#pragma once

// Deterministic random streams and a small index-parallel loop.
//
// Every random quantity in the library is drawn from a generator keyed by
// (seed, index, stage), so results never depend on how work is split
// across threads.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace hardedge {

using Rng = std::mt19937_64;

/// Stage tags separating independent uses of the same (seed, index).
enum class Stage : std::uint64_t {
  tridiagonal = 1,
  hkpv = 2,
  retry = 3,
  dynamics = 4,
  bootstrap = 5,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Mixes the three components into one 64-bit key.
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index, std::uint64_t stage);

Rng make_rng(std::uint64_t seed, std::uint64_t index, Stage stage, std::uint64_t attempt = 0);

/// Worker count from HEL_WORKERS, falling back to 1.
int default_workers();

/// Runs body(i) for i in [0, count) on up to `workers` threads. The first
/// exception thrown by any body is rethrown after all threads join.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace hardedge
