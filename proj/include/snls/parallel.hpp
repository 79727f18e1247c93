#pragma once

#include <functional>

namespace snls {

// Runs body(i) for i in [0, n) on up to `parallelism` threads with static
// contiguous chunks. The first exception thrown (lowest chunk) is rethrown
// after all workers join. Results must be written by index so that the
// outcome does not depend on the thread count.
void parallel_for(int n, int parallelism, const std::function<void(int)>& body);

}  // namespace snls
