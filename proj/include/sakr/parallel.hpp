#pragma once

#include <cstddef>
#include <functional>

namespace sakr {

// Thread budget: SAKR_THREADS env var, 0 or unset = hardware concurrency.
int thread_budget();

// Runs fn(begin, end, block_index) over fixed-size blocks of [0, n).
// Block boundaries depend only on (n, block_size), never on the thread
// count, so per-block partial results reduced in block order give
// schedule-independent totals.
void parallel_blocks(std::size_t n, std::size_t block_size,
                     const std::function<void(std::size_t, std::size_t,
                                              std::size_t)>& fn);

inline std::size_t block_count(std::size_t n, std::size_t block_size) {
    return block_size == 0 ? 0 : (n + block_size - 1) / block_size;
}

}  // namespace sakr
