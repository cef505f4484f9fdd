#pragma once

#include <cstddef>
#include <functional>

namespace wisdomdyn {

/// Thread cap from the WISDOMDYN_THREADS environment variable, otherwise the
/// hardware concurrency (at least 1).
std::size_t default_thread_count();

/// Calls body(begin, end) over contiguous blocks covering [0, count) on up to
/// `threads` workers (0 selects default_thread_count()). Blocks are disjoint,
/// so bodies that only write their own slots need no synchronization.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace wisdomdyn
