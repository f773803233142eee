#pragma once

#include <cstddef>
#include <functional>

namespace dampen {

// Worker count: DAMPEN_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t thread_cap();

// Runs body(i) for i in [0, count) on up to thread_cap() threads. Each index
// runs exactly once; the first exception thrown is rethrown after all
// workers finish. Calls made from inside a worker run serially.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace dampen
