#include "heatup/threads.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace heatup {

int thread_count() {
    static const int cached = [] {
        unsigned hw = std::thread::hardware_concurrency();
        if (hw == 0) hw = 1;
        if (const char* env = std::getenv("HEATUP_THREADS")) {
            long cap = std::strtol(env, nullptr, 10);
            if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
        }
        return static_cast<int>(hw);
    }();
    return cached;
}

void parallel_for(std::size_t n, std::size_t min_chunk,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t workers = static_cast<std::size_t>(thread_count());
    if (min_chunk == 0) min_chunk = 1;
    workers = std::min(workers, (n + min_chunk - 1) / min_chunk);
    if (workers <= 1) {
        fn(0, n);
        return;
    }

    std::size_t chunk = n / workers;
    std::size_t rem = n % workers;
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    std::size_t begin = 0;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t len = chunk + (w < rem ? 1 : 0);
        std::size_t end = begin + len;
        if (w + 1 == workers) {
            fn(begin, end);
        } else {
            pool.emplace_back(fn, begin, end);
        }
        begin = end;
    }
    for (auto& t : pool) t.join();
}

}  // namespace heatup
