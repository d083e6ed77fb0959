#pragma once

#include <cstddef>
#include <functional>

namespace hysim {

/// Worker count: HYSIM_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. Indices are
/// handed out dynamically. The first exception thrown by any call is rethrown
/// after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace hysim
