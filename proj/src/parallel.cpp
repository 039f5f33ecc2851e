#include "granulex/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace granulex {

namespace {
thread_local bool in_worker = false;
}

std::size_t thread_count() {
    if (const char* env = std::getenv("GRANULEX_THREADS")) {
        try {
            long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    std::size_t workers = std::min(thread_count(), n);
    if (in_worker || workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::size_t failed_at = n;
    std::mutex failure_mutex;

    auto run = [&] {
        in_worker = true;
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                // Report the lowest failing index so the error is schedule-independent.
                std::lock_guard lock(failure_mutex);
                if (i < failed_at) {
                    failed_at = i;
                    failure = std::current_exception();
                }
            }
        }
        in_worker = false;
    };

    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace granulex
