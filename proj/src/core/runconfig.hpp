#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/embedding.hpp"
#include "core/inference.hpp"
#include "core/probability.hpp"

namespace zscomp {

struct FixtureConfig {
    uint32_t objects = 20;
    uint32_t scenes = 15;
    uint32_t actions = 10;
    uint32_t videos = 50;
    uint32_t dim = 16;
    uint32_t max_attempts = 50;
    bool verify = true;
};

/// Flat JSON config shared by every command; unknown keys are rejected.
/// Relative paths are resolved against the config file's directory.
struct RunConfig {
    std::string objects_vocab, scenes_vocab, actions_vocab;
    std::string objects_embeddings, scenes_embeddings, actions_embeddings;
    std::string objects_probabilities, scenes_probabilities;
    std::string ground_truth;
    std::string cache_file;
    std::string output_dir;

    std::string embeddings_format = "auto";    // auto | word2vec_text | binary_table
    std::string probabilities_format = "auto"; // auto | csv | zspm_binary

    Method method = Method::compositions;
    uint32_t k_objects = 100;
    uint32_t k_scenes = 5;
    uint32_t k_concatenation = 100;
    uint32_t k_compositions = 250;
    double lambda = 0.75;
    bool diversify = true;
    std::string pool_size = "default"; // default | full | positive integer
    std::string oov_policy = "fail";   // fail | zero
    bool renormalize = false;
    bool normalize_before_sum = false;
    bool exclude_self_pairs = false;
    bool clip_similarities = false;

    std::optional<uint32_t> subset_size;
    uint32_t num_trials = 10;
    std::vector<uint32_t> subset_sizes;
    std::optional<Method> baseline_method;
    std::vector<Method> ablate_methods;

    uint64_t seed = 0;
    int threads = 0;
    FixtureConfig fixture;

    int64_t pool_value() const; // -1 full, 0 default rule, >0 explicit
    OovPolicy oov() const;
    EmbeddingFormat embedding_format_for(const std::string& path) const;
    ProbabilityFormat probability_format_for(const std::string& path) const;
};

RunConfig parse_config(const nlohmann::json& j, const std::string& base_dir);

/// Checks presence, ranges and file existence for one command; throws
/// config errors naming the offending field.
void validate_config(const RunConfig& c, const std::string& command);

/// Everything that affects results; excludes threads and output_dir so
/// reruns with different parallelism or destinations stay byte-identical.
nlohmann::json echo_config(const RunConfig& c, const std::string& command);

} // namespace zscomp
