#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace torusforge::parallel {

// Worker count for a batch of independent jobs; TORUSFORGE_THREADS caps it.
inline int worker_count(int jobs) {
    unsigned hw = std::thread::hardware_concurrency();
    int cap = hw ? static_cast<int>(hw) : 1;
    if (const char* env = std::getenv("TORUSFORGE_THREADS")) {
        try {
            cap = std::clamp(std::stoi(env), 1, cap);
        } catch (...) {
            // malformed values fall back to the hardware count
        }
    }
    return std::max(1, std::min(cap, jobs));
}

// Runs fn(i) for i in [0, n) on a bounded pool.  Jobs must be independent;
// the first (lowest-index) captured exception is rethrown after all join.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    int workers = worker_count(n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errs(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    errs[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

} // namespace torusforge::parallel
