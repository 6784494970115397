#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace karman {

// Process-wide worker count for parallel_for. 0 means hardware concurrency.
inline int& thread_count() {
    static int n = 0;
    return n;
}

// Chunked fork-join loop. body(i) must only write to slots owned by index i,
// which keeps results identical for any worker count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    std::size_t workers = thread_count() > 0
                              ? static_cast<std::size_t>(thread_count())
                              : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1 || n < 4) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t t = 0; t < workers; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace karman
