#include "loomkit/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace loomkit {

int worker_count() {
    if (const char* env = std::getenv("LOOMKIT_THREADS")) {
        char* end = nullptr;
        const long parsed = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && parsed > 0) {
            return static_cast<int>(std::min<long>(parsed, 256));
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_rows(int rows, const std::function<void(int, int)>& fn) {
    if (rows <= 0) {
        return;
    }
    const int workers = std::min(worker_count(), rows);
    if (workers <= 1) {
        fn(0, rows);
        return;
    }
    const int chunk = (rows + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(rows, begin + chunk);
        if (begin >= end) {
            break;
        }
        pool.emplace_back(fn, begin, end);
    }
    for (std::thread& th : pool) {
        th.join();
    }
}

}  // namespace loomkit
