#pragma once

#include <cstddef>
#include <functional>

namespace heatup {

// Worker count: min(hardware_concurrency, HEATUP_THREADS) when the
// environment variable is set, hardware_concurrency otherwise. At least 1.
int thread_count();

// Runs fn(begin, end) over a fixed contiguous partition of [0, n).
// The partition depends only on n and the resolved thread count, and
// callers must keep chunks independent, so results never depend on
// scheduling. Falls back to a single inline call for small n.
void parallel_for(std::size_t n, std::size_t min_chunk,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace heatup
