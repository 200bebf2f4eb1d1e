// Minimal fork-join helper. Thread count comes from QGRAPH_THREADS,
// falling back to the hardware concurrency.
#pragma once

#include <cstddef>
#include <functional>

namespace qg {

int thread_count();
void set_thread_count(int n);

// Calls body(i) for i in [0, n). Results must be written to per-index
// slots by the caller so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qg
