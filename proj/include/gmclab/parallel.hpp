#pragma once

#include <cstddef>
#include <functional>

namespace gmclab {

/// Worker count from GMCLAB_WORKERS, else the hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, count) on the worker pool. Bodies write into
/// per-index slots; reductions happen afterwards in index order.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace gmclab
