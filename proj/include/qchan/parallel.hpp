#pragma once

#include <cstddef>
#include <functional>

namespace qchan {

// Worker count for a batch of independent jobs: hardware concurrency, capped by
// the QCHAN_THREADS environment variable when set, never more than jobs.
std::size_t worker_count(std::size_t jobs);

// Runs fn(i) for i in [0, jobs) across a small thread pool. Results must be
// written to pre-sized slots so ordering stays deterministic. The first worker
// exception is rethrown on the calling thread.
void parallel_for_index(std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace qchan
