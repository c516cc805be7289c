#pragma once
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace liesphere {

inline int thread_budget() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("LIESPHERE_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0 && cap < n) n = cap;
    }
    return n;
}

/// Static partition of [0, n) over the thread budget. Work items write to
/// disjoint slots, so results are deterministic.
inline void parallel_for(int n, const std::function<void(int)>& body) {
    const int nt = std::min(thread_budget(), n);
    if (nt <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&, t]() {
            for (int i = t; i < n; i += nt) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace liesphere
