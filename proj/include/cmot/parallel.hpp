#pragma once

#include <cstddef>
#include <functional>

namespace cmot {

// Worker count for data-parallel kernels. Defaults to the hardware
// concurrency, capped by the CMOT_THREADS environment variable.
int thread_count();
void set_thread_count(int n);

// Runs body(begin, end) over contiguous chunks of [0, n). Chunks write
// disjoint data, so results do not depend on the thread count. Small ranges
// run inline.
void parallel_for(std::size_t n, std::size_t min_chunk,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace cmot
