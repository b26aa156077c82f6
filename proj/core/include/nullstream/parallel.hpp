#pragma once

#include <cstddef>
#include <functional>

namespace nullstream {

/// Worker count: NULLSTREAM_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t thread_count();

/// Runs fn(i) for i in [0, n) on up to thread_count() threads. Results must be
/// written to per-index slots by the caller; the first exception thrown by any
/// task is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace nullstream
