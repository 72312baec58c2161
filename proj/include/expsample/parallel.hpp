#pragma once

#include <cstddef>
#include <functional>

namespace expsample {

/// Worker count from EXPSAMPLE_THREADS (0 or unset = hardware concurrency).
unsigned thread_count();

/// Calls body(i) for i in [0, n) across up to thread_count() threads. The first
/// exception thrown by any task is rethrown after all workers have joined.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace expsample
