#pragma once

#include <cstdint>
#include <vector>

#include "core/evaluation.hpp"
#include "core/inference.hpp"

namespace zscomp {
namespace oracle {

/// Naive reference pipeline for tests and `oracle-check`. Materializes every
/// composition embedding, full-sorts similarities, runs exact greedy MMR and
/// scores by direct summation. Shares data containers with the engine but
/// none of its numeric kernels.
struct Config {
    Method method = Method::compositions;
    uint32_t k = 250;
    double lambda = 0.75;
    bool diversify = true;
    int64_t pool_size = -1; // -1 full, 0 default rule, >0 explicit
    uint32_t k_objects = 100;
    uint32_t k_scenes = 5;
    uint32_t k_concatenation = 100;
    bool clip_similarities = false;
    bool normalize_before_sum = false;
    bool exclude_self_pairs = false;
};

struct Selected {
    CompositionRef ref;
    double similarity = 0.0;
    double mmr_score = 0.0;
};

struct Result {
    std::vector<std::vector<Selected>> sets; // per action; composition methods
    std::vector<std::string> video_ids;
    std::vector<double> scores; // |V| x |A|, row-major
    std::vector<uint32_t> predictions;
};

constexpr size_t kMaxCompositions = 100000;

/// Runs the whole reference pipeline. Probability matrices may be null for
/// methods that do not read them; passing videos is optional (selection-only
/// checks leave scores empty).
Result pipeline(const EmbeddingTable& objects, const EmbeddingTable& scenes,
                const EmbeddingTable& actions, const ProbabilityMatrix* object_probs,
                const ProbabilityMatrix* scene_probs, const Config& config);

} // namespace oracle
} // namespace zscomp
