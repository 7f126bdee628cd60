#pragma once
#include <cstddef>
#include <functional>

namespace nhfp {

/// Number of worker threads: min(hardware, NHFP_THREADS) with NHFP_THREADS
/// read from the environment (values < 1 mean 1).
int thread_count();

/// Run fn(i) for i in [0, n). Work is split over thread_count() threads;
/// callers write results into preallocated per-index slots, so the output
/// is independent of the execution order. Exceptions are captured and the
/// first one is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace nhfp
