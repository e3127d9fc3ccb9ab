#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace qgcam {

// Thread cap: QGCAM_THREADS env var when set, else hardware concurrency.
// Read on every call so tests can flip it at runtime.
inline int thread_cap() {
    if (const char* env = std::getenv("QGCAM_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, count) over contiguous static ranges. fn must write
// only to its own per-index slot; callers do any reduction afterwards in
// ascending index order, so results do not depend on the thread count.
inline void parallel_for(std::size_t count,
                         const std::function<void(std::size_t)>& fn) {
    const std::size_t threads =
        std::min<std::size_t>(static_cast<std::size_t>(thread_cap()), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace qgcam
