#pragma once

#include <cstddef>
#include <functional>

namespace zscomp {

// 0 = auto (hardware concurrency), otherwise the requested count.
int resolve_threads(int requested);

// Runs fn(i) for i in [begin, end) across `threads` workers on contiguous
// chunks. Work items must be independent and write only to their own slots;
// results are then identical for every thread count. The first exception
// thrown by a worker is rethrown on the caller.
void parallel_for(size_t begin, size_t end, int threads,
                  const std::function<void(size_t)>& fn);

} // namespace zscomp
