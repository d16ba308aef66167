#pragma once

#include <cstddef>
#include <functional>

namespace mrdc {

/// Worker count: min(MRDC_THREADS, hardware concurrency), at least 1.
int worker_count();

/// Runs fn(i) for i in [0, n), spread over worker_count() threads.
/// Callers own determinism: write results into per-index slots and reduce
/// in index order afterwards.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mrdc
