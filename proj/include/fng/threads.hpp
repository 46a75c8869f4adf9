#pragma once

#include <cstddef>
#include <functional>

namespace fng {

// Worker count: FNG_THREADS environment variable when set (>=1), otherwise
// the hardware concurrency.
std::size_t worker_count();

// Runs job(i) for i in [0, njobs) on a pool of worker threads. Callers keep
// results in per-index slots so the outcome is independent of scheduling.
void parallel_for(std::size_t njobs, const std::function<void(std::size_t)>& job,
                  std::size_t max_workers = 0);

} // namespace fng
