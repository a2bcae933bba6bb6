#include "sakr/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace sakr {

int thread_budget() {
    if (const char* env = std::getenv("SAKR_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_blocks(std::size_t n, std::size_t block_size,
                     const std::function<void(std::size_t, std::size_t,
                                              std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t blocks = block_count(n, block_size);
    const int budget = thread_budget();
    if (budget <= 1 || blocks <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) {
            std::size_t begin = b * block_size;
            std::size_t end = std::min(begin + block_size, n);
            fn(begin, end, b);
        }
        return;
    }
    // Threads claim block indices; outputs are keyed by block index so the
    // claim order cannot affect results.
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= blocks) return;
            std::size_t begin = b * block_size;
            std::size_t end = std::min(begin + block_size, n);
            fn(begin, end, b);
        }
    };
    std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(budget), blocks);
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

}  // namespace sakr
