#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace uwsim::detail {

/// Runs fn(i) for i in [0, n). threads = 0 means hardware concurrency.
/// Tasks are claimed through an atomic counter; callers must make tasks
/// independent so that results cannot depend on the worker count.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    std::size_t nworkers = threads <= 0 ? hw : static_cast<std::size_t>(threads);
    if (nworkers > n) nworkers = n;
    if (nworkers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    for (std::size_t w = 0; w < nworkers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace uwsim::detail
