#pragma once

#include <functional>

namespace oneshot {

/// Runs fn(i) for i in [0, n) across up to `jobs` threads. Work units must be
/// independent; results should be written to slots indexed by i so the outcome
/// does not depend on scheduling. jobs <= 1 runs inline; jobs == 0 uses the
/// hardware thread count.
void parallel_for(long n, int jobs, const std::function<void(long)>& fn);

int resolve_jobs(int jobs);

}  // namespace oneshot
