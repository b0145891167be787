#pragma once

#include <cstddef>
#include <functional>

namespace harq_ee {

/// Worker count: hardware concurrency, capped by HARQ_EE_THREADS when set.
unsigned thread_budget();

/// Runs task(i) for i in [0, count) on up to `threads` workers (0 = thread_budget()).
/// Tasks must write to disjoint outputs; the first exception is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task);

} // namespace harq_ee
