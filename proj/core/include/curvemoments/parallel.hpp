#pragma once

#include <cstddef>
#include <functional>

namespace curvemoments {

// Number of worker threads. Reads CURVEMOMENTS_WORKERS once; falls back to
// hardware concurrency. Always >= 1.
std::size_t worker_count();

// Runs fn(begin, end) over disjoint contiguous chunks of [0, n). Callers must
// write only to per-index slots so results are independent of scheduling.
// Ranges below `grain` run inline on the calling thread; worker exceptions
// are rethrown after the join.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                  std::size_t grain = 256);

} // namespace curvemoments
