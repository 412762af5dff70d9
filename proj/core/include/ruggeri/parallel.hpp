#pragma once

#include <cstddef>
#include <functional>

namespace ruggeri {

/// Worker count: RUGGERI_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int worker_count();

/// Calls body(i) for i in [0, n) on up to `threads` workers (0 = worker_count()).
/// Indices are handed out in contiguous blocks; callers write results by index,
/// so the outcome does not depend on scheduling. The first exception thrown by
/// any body is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int threads = 0);

}  // namespace ruggeri
