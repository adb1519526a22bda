#pragma once

// Static-partition parallel loop. Each index is handled by exactly one thread
// and writes only its own outputs, so results do not depend on thread count.

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace patchflow {

/// Worker count: PATCHFLOW_THREADS if set (>= 1), else the hardware concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("PATCHFLOW_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

template <class F>
void parallel_for(std::size_t n, const F& fn) {
    const auto threads = static_cast<std::size_t>(std::min<unsigned>(thread_count(), static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            const std::size_t lo = n * t / threads;
            const std::size_t hi = n * (t + 1) / threads;
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace patchflow
