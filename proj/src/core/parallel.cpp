#include "core/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace zscomp {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(size_t begin, size_t end, int threads,
                  const std::function<void(size_t)>& fn) {
    if (begin >= end) return;
    size_t n = end - begin;
    size_t workers = static_cast<size_t>(resolve_threads(threads));
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (size_t i = begin; i < end; ++i) fn(i);
        return;
    }

    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto run_chunk = [&](size_t lo, size_t hi) {
        try {
            for (size_t i = lo; i < hi; ++i) fn(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    size_t chunk = (n + workers - 1) / workers;
    for (size_t w = 0; w < workers; ++w) {
        size_t lo = begin + w * chunk;
        size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(run_chunk, lo, hi);
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace zscomp
