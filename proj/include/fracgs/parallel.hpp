#pragma once

#include <cstddef>
#include <functional>

namespace fracgs {

/// Worker count: hardware concurrency, capped by FRACGS_THREADS when set.
unsigned worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index runs
/// exactly once; callers write results into slot i so merging is deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fracgs
