#pragma once

#include <cstddef>
#include <functional>

namespace floer {

/// Worker count: FLOER_THREADS if set (>= 1), else the hardware concurrency.
std::size_t thread_count();

/// Runs fn(0..n-1) on up to thread_count() threads. Each index must write
/// only its own output slot. If several calls throw, the exception of the
/// smallest index is rethrown, so failures do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace floer
