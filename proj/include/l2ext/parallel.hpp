#pragma once

#include <cstddef>
#include <functional>

namespace l2ext {

/// Worker count used by the grid checks and sweeps; 0 or 1 runs inline.
void set_default_jobs(int jobs);
int default_jobs();

/// Calls body(i) for i in [0, n) on up to `jobs` threads (default_jobs() when
/// negative). Each index runs exactly once; callers write results by index so
/// reductions stay in a fixed order. An exception thrown by any index stops the
/// remaining work and is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int jobs = -1);

}  // namespace l2ext
