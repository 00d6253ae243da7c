#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace zscomp {

// splitmix64 is the single random generator used anywhere in the project.
// It is fully specified by the code below, so every draw is reproducible
// across platforms, compilers and thread counts.
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Bounded draw via 128-bit multiply-shift. Deterministic; the residual
    // bias (< 2^-64 * bound) is irrelevant for sampling test subsets.
    uint64_t below(uint64_t bound) {
        return static_cast<uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    // Uniform in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Zero-mean, roughly normal draw (Irwin-Hall with four terms). Avoids
    // libm so the stream stays bit-identical everywhere.
    double centered() { return unit() + unit() + unit() + unit() - 2.0; }

  private:
    uint64_t state_;
};

// Derives the seed of stream `stream` from a base seed. Trial i of an
// experiment uses mix_seed(seed, i) as its private generator seed.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    SplitMix64 g(seed ^ ((stream + 1) * 0x9e3779b97f4a7c15ULL));
    return g.next();
}

// FNV-1a over little-endian u32 words; used to fingerprint sampled action
// subsets in trial reports.
inline uint64_t fnv1a64(std::span<const uint32_t> values) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (uint32_t v : values) {
        for (int shift = 0; shift < 32; shift += 8) {
            h ^= (v >> shift) & 0xffu;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

// Samples `count` distinct values from [0, n) by partial Fisher-Yates and
// returns them sorted ascending.
std::vector<uint32_t> sample_without_replacement(SplitMix64& gen, uint32_t n,
                                                 uint32_t count);

} // namespace zscomp
