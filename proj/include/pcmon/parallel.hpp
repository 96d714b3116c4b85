#pragma once

#include <cstddef>
#include <functional>

namespace pcmon {

/// Caps the number of worker threads used by data-parallel loops.
/// 0 restores the default (hardware concurrency).
void set_max_threads(unsigned count);
unsigned max_threads();

/// Runs `body(begin, end)` over contiguous chunks of [0, n). Chunk
/// boundaries depend only on `n` and the thread cap, and each chunk writes
/// disjoint output, so results never depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace pcmon
