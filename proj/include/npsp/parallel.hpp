#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace npsp {

    /// Runs fn(i) for i in [0, n) on at most `workers` threads. Results must be
    /// written to per-index slots; the schedule is unspecified. The first
    /// exception thrown by any task is rethrown after all threads join.
    template <typename Fn>
    void parallel_for(std::size_t n, int workers, Fn&& fn)
    {
        const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
        if (threads <= 1) {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        {
            std::vector<std::jthread> pool;
            pool.reserve(threads);
            for (std::size_t t = 0; t < threads; ++t)
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < n; i = next++) {
                        try {
                            fn(i);
                        }
                        catch (...) {
                            std::lock_guard lock(error_mutex);
                            if (!error)
                                error = std::current_exception();
                            next = n;
                        }
                    }
                });
        }
        if (error)
            std::rethrow_exception(error);
    }

} // namespace npsp
