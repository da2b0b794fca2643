#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace isophasal {

/// Worker count: hardware concurrency, capped by ISOPHASAL_THREADS when set.
unsigned worker_count();

/// Splits [0, n) into contiguous chunks, one per worker, and runs
/// body(begin, end, worker) on each. Results must be written by index so the
/// outcome does not depend on scheduling. Rethrows the first worker exception.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t, unsigned)>& body,
                  unsigned workers = 0);

/// Pairwise summation in a fixed order.
double pairwise_sum(const double* v, std::size_t n);
double pairwise_sum(const std::vector<double>& v);

}  // namespace isophasal
