#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace gradstorm {

/// Worker count: GRADSTORM_THREADS when set to a positive integer, else the
/// hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, n) on up to `workers` threads. Indices are
/// claimed dynamically but every result lands in its own slot, so output
/// never depends on the schedule. The first exception is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body, unsigned workers = worker_count()) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned spawn = static_cast<unsigned>(std::min<std::size_t>(workers, n)) - 1;
    std::vector<std::jthread> pool;
    pool.reserve(spawn);
    for (unsigned w = 0; w < spawn; ++w) pool.emplace_back(run);
    run();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn, unsigned workers = worker_count()) {
    std::vector<T> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = fn(i); }, workers);
    return out;
}

}  // namespace gradstorm
