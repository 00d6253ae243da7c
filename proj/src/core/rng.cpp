#include "core/rng.hpp"

#include <algorithm>
#include <numeric>

#include "core/error.hpp"

namespace zscomp {

std::vector<uint32_t> sample_without_replacement(SplitMix64& gen, uint32_t n,
                                                 uint32_t count) {
    if (count > n)
        raise(ErrorKind::argument, "cannot sample " + std::to_string(count) +
                                       " distinct values from a population of " +
                                       std::to_string(n));
    std::vector<uint32_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0u);
    for (uint32_t i = 0; i < count; ++i) {
        uint32_t j = i + static_cast<uint32_t>(gen.below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace zscomp
