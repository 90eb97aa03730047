#pragma once

#include <cstddef>
#include <functional>

namespace mrt {

// Thread count used by library loops. 0 means "resolve from MRT_THREADS, then hardware".
void set_threads(int n);
int threads();

// Runs f(i) for i in [0, n). Each index owns its output slot, so results do not
// depend on the thread count. The first exception thrown is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace mrt
