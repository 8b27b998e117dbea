#pragma once

#include <cstddef>
#include <functional>

namespace gms {

/// Clamp a requested worker count: 0 means "use the hardware concurrency",
/// anything else is taken as-is (minimum 1).
int resolve_workers(int requested);

/// Run fn(i) for i in [0, count) on up to `workers` threads.
///
/// Work items must be independent and write only to their own preallocated
/// slots; under that contract results are identical for any worker count.
/// Items are handed out through a shared atomic counter, so the schedule is
/// nondeterministic but the output is not. If any item throws, the exception
/// from the lowest index is rethrown after all threads join.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

} // namespace gms
