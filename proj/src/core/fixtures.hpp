#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/embedding.hpp"
#include "core/evaluation.hpp"
#include "core/probability.hpp"
#include "core/vocab.hpp"

namespace zscomp {

struct FixtureSpec {
    uint32_t objects = 20;
    uint32_t scenes = 15;
    uint32_t actions = 10;
    uint32_t videos = 50;
    uint32_t dim = 16;
    uint64_t seed = 0;
    uint32_t max_attempts = 50;
    // Resample until compositions beat both single-source baselines on the
    // generated data. Skipped automatically when the instance is too small
    // to carry the planted structure (or has no videos at all).
    bool verify = true;
};

/// A complete synthetic instance. Each action gets one planted object and
/// scene; consecutive actions share one of the two, so only the pair
/// disambiguates them. Action embeddings point at the planted pair's sum,
/// probability rows are boosted on the planted labels.
struct Fixture {
    FixtureSpec spec;
    Vocabulary objects, scenes, actions;
    std::vector<float> object_vecs, scene_vecs, action_vecs;
    std::vector<std::string> video_ids;
    std::vector<float> object_probs, scene_probs; // row-major videos x labels
    std::vector<uint32_t> truth;                  // action per video
    uint32_t attempts_used = 0;
    bool verified = false;
    // Instance-scaled selection sizes, used verbatim by the emitted config.
    uint32_t k_objects = 0, k_scenes = 0, k_concatenation = 0, k_compositions = 0;

    EmbeddingTable object_table() const;
    EmbeddingTable scene_table() const;
    EmbeddingTable action_table() const;
    ProbabilityMatrix object_matrix() const;
    ProbabilityMatrix scene_matrix() const;
    GroundTruth ground_truth() const;
};

Fixture generate_fixture(const FixtureSpec& spec);

/// Zero-padded deterministic names: object007, scene012, action03, video0001.
std::vector<std::string> fixture_labels(const std::string& prefix, uint32_t count,
                                        uint32_t min_width);

} // namespace zscomp
