#pragma once

#include <cstddef>
#include <functional>

namespace quantest {

/// Worker count for `requested` threads: 0 means one per hardware thread.
unsigned resolve_threads(unsigned requested) noexcept;

/// Runs fn(0) .. fn(n - 1) on up to `threads` workers. Items are claimed
/// from a shared counter, so callers must write results by index to stay
/// schedule independent. The first exception thrown by any item is
/// rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Pairwise (cascade) sum, deterministic for a given input order.
double pairwise_sum(const double* x, std::size_t n) noexcept;

}  // namespace quantest
