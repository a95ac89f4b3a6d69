#pragma once

#include <cstddef>
#include <functional>

namespace fluxcz {

// Runs body(i) for i in [0, count) on up to hardware_concurrency threads.
// Calls made from inside a parallel_for body run serially. The first
// exception thrown by any body is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace fluxcz
