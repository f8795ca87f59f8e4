#pragma once

#include <cstddef>
#include <functional>

namespace ponder {

/// Worker count: min(PONDER_THREADS if set, hardware concurrency), at least 1.
std::size_t worker_count();

/// Run fn(i) for i in [0, n) across workers. Results must be written to
/// preassigned slots so that the outcome is independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ponder
