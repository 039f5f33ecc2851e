#pragma once

#include <cstddef>
#include <functional>

namespace granulex {

/// Worker count: GRANULEX_THREADS when set to a positive integer,
/// otherwise the hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Iterations must write only to their own
/// slots. Calls made from inside a worker run serially, so nested loops never
/// oversubscribe.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace granulex
