#pragma once

#include <cstddef>
#include <functional>

namespace codedopt {

/// Worker cap from CODEDOPT_THREADS (unset or 0 = hardware concurrency).
std::size_t thread_budget();

/// Runs body(i) for i in [0, count) on up to thread_budget() threads. Callers
/// write results into slot i, so output never depends on scheduling. The
/// first exception thrown by any task is rethrown after all threads join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace codedopt
