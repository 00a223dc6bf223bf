#pragma once

#include <cstddef>
#include <functional>

namespace rwde {

/// Thread count from RWDE_THREADS, else hardware concurrency (at least 1).
std::size_t default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// processed exactly once; callers write into per-index slots so results do
/// not depend on the thread count. The first exception thrown by any worker is
/// rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace rwde
