#pragma once
#include <cstddef>
#include <functional>

namespace declab {

// Worker count: LAB_THREADS if set and positive, else hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, n) on a bounded pool. Callers write results by index,
// so output never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace declab
