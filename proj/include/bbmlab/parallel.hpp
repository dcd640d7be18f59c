// parallel.hpp
//
// Replica-parallel loop with deterministic results: the body writes only to
// replica-indexed slots and randomness comes from per-replica substreams, so
// output is identical for any thread count.

#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bbmlab {

template <class Body>
void parallel_for(std::uint64_t n, int threads, Body&& body) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (threads == 1 || n < 2) {
        for (std::uint64_t i = 0; i < n; ++i) body(i);
        return;
    }

    std::atomic<std::uint64_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    const std::uint64_t chunk = 16;

    auto worker = [&]() {
        for (;;) {
            const std::uint64_t start = next.fetch_add(chunk);
            if (start >= n) return;
            const std::uint64_t end = std::min(start + chunk, n);
            for (std::uint64_t i = start; i < end; ++i) {
                if (first_error) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads - 1));
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace bbmlab
