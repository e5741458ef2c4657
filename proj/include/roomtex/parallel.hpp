#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace roomtex {

// Global worker-count knob; 0 means hardware_concurrency. Set once at startup
// by the CLI, read by the parallel loops below.
int worker_count();
void set_worker_count(int n);

// Runs fn(i) for i in [0, n). Work is handed out in small chunks via an atomic
// counter, so results must be written to preallocated, index-addressed slots —
// which also keeps every output independent of scheduling order.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    int workers = worker_count();
    if (workers <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    const size_t chunk = std::max<size_t>(1, n / (static_cast<size_t>(workers) * 8));
    auto body = [&] {
        while (true) {
            size_t begin = next.fetch_add(chunk);
            if (begin >= n) break;
            size_t end = std::min(n, begin + chunk);
            for (size_t i = begin; i < end; ++i) fn(i);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
}

}  // namespace roomtex
