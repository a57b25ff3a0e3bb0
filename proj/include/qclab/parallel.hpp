#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace qclab {

/// Worker count for cell sampling. Honors QCLAB_THREADS when it parses as a
/// positive integer, otherwise std::thread::hardware_concurrency() (min 1).
unsigned thread_count();

/// Runs body(i) for i in [0, n) over contiguous chunks on thread_count()
/// threads. If any call throws, the exception from the lowest failing index
/// is rethrown after all workers join, so failures are reproducible.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qclab
