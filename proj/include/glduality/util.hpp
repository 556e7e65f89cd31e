#pragma once

#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace glduality {

// Worker cap from GLDUALITY_THREADS; defaults to 1 (serial).
inline int thread_limit() {
    const char* env = std::getenv("GLDUALITY_THREADS");
    if (!env) return 1;
    const int v = std::atoi(env);
    if (v < 1) return 1;
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    return hw > 0 ? std::min(v, hw) : v;
}

// Runs body(i) for i in [0, count). Each index writes only its own slot, so
// results do not depend on the schedule.
inline void parallel_for(int count, const std::function<void(int)>& body) {
    const int workers = std::min(thread_limit(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (int i = w; i < count; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace glduality
