// Minimal fork-join loop over an index range.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace wpc {

/// Calls body(k) for k in [0, count) on up to `jobs` threads. The body must
/// not throw; callers record failures per index.
template <typename Body>
void parallel_for(std::size_t count, int jobs, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), count);
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) body(k);
        });
    for (auto& t : pool) t.join();
}

}  // namespace wpc
