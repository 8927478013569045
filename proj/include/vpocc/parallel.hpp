#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace vpocc {

/// Runs fn(begin, end) over contiguous chunks of [begin, end) on `threads`
/// worker threads. Callers must only write to disjoint output ranges; under
/// that contract the result is independent of the thread count.
inline void parallel_for(std::int64_t begin, std::int64_t end, int threads,
                         const std::function<void(std::int64_t, std::int64_t)>& fn) {
    const std::int64_t n = end - begin;
    if (n <= 0) {
        return;
    }
    if (threads <= 1 || n == 1) {
        fn(begin, end);
        return;
    }
    const int workers = static_cast<int>(std::min<std::int64_t>(threads, n));
    const std::int64_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        const std::int64_t lo = begin + t * chunk;
        const std::int64_t hi = std::min(end, lo + chunk);
        if (lo >= hi) {
            break;
        }
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& th : pool) {
        th.join();
    }
}

} // namespace vpocc
