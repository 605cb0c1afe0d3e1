#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace cosim::detail {

/// Run fn(0..n-1), using up to `in_flight` worker threads when the backend
/// allows concurrent calls. Results must be written to pre-sized slots so
/// ordering stays deterministic.
template <typename Fn>
inline void for_each_agent(size_t n, size_t in_flight, Fn&& fn) {
    if (in_flight <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> threads;
    const size_t count = std::min(in_flight, n);
    threads.reserve(count);
    for (size_t w = 0; w < count; ++w) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
}

}  // namespace cosim::detail
