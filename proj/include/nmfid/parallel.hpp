#ifndef NMFID_PARALLEL_HPP
#define NMFID_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace nmfid {

// Worker cap for internal parallelism.  NMFID_THREADS overrides the
// hardware default; any value below 1 (or garbage) falls back to 1.
inline unsigned max_threads() {
    if (const char* env = std::getenv("NMFID_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
        return 1;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Runs fn(i) for i in [0, n) over a shared atomic counter.  Results must be
// written by fn into storage indexed by i so the outcome does not depend on
// scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    unsigned workers = max_threads();
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    if (workers > n) workers = static_cast<unsigned>(n);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t)
        pool.emplace_back([&]() {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace nmfid

#endif  // NMFID_PARALLEL_HPP
