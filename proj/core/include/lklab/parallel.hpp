#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace lklab {

/// Worker count: LKLAB_WORKERS if set and positive, else hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, n) on a pool of workers. Work is handed out by an
/// atomic counter; the first exception thrown by any task is rethrown after
/// all workers have stopped.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int workers = 0);

/// Independent stream seed for (seed, index, attempt) via SplitMix64 mixing,
/// so per-sample randomness does not depend on scheduling.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt = 0);
std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt = 0);

}  // namespace lklab
