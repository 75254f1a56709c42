#pragma once

#include <cstddef>
#include <functional>

namespace ftkn::harness {

/// Worker count: FTKN_THREADS when set (at least 1), else the hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to `workers` threads. Each index runs exactly
/// once; callers write results by index so the outcome does not depend on scheduling.
/// The first exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t workers = 0);

}  // namespace ftkn::harness
