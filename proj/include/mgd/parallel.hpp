#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace mgd {

/// Worker cap from the MGD_THREADS environment variable. Unset, empty or 0
/// means std::thread::hardware_concurrency(). Always at least 1.
std::size_t worker_count();

/// Splits [0, count) into contiguous ranges, one per worker, and runs
/// body(begin, end) on each. Ranges are disjoint; the caller owns the
/// ordering of results. Exceptions from workers are rethrown (first range
/// index wins).
void parallel_ranges(std::size_t count,
                     const std::function<void(std::size_t, std::size_t)>& body);

/// Pairwise (cascade) summation in index order.
double pairwise_sum(std::span<const double> values);

}  // namespace mgd
