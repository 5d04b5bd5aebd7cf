#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace freeconv {

/// Thread budget: explicit request, else FREECONV_THREADS, else hardware.
inline int thread_count(int requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FREECONV_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(i) for i in [0, n); deterministic assignment of indices, so
/// outputs written per-index are reproducible regardless of thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         int threads = 0) {
    int nt = std::min<int>(thread_count(threads), static_cast<int>(n == 0 ? 1 : n));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = static_cast<std::size_t>(t); i < n;
                     i += static_cast<std::size_t>(nt))
                    fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace freeconv
