#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/probability.hpp"
#include "core/selection.hpp"

namespace zscomp {

enum class Method {
    compositions,
    compositions_weighted_scoring,
    compositions_weighted_selection,
    object_only,
    scene_only,
    concatenation,
    late_fusion,
};

const char* method_name(Method m);
std::optional<Method> parse_method(std::string_view name);
bool method_uses_objects(Method m);
bool method_uses_scenes(Method m);
bool method_is_compositional(Method m);

enum class WeightMode { none, in_scoring };

/// |V| x |A| action scores; action_ids may be a subset of the vocabulary.
struct ScoreMatrix {
    std::vector<std::string> video_ids;
    std::vector<uint32_t> action_ids;
    std::vector<double> scores;

    double at(size_t video, size_t action_idx) const {
        return scores[video * action_ids.size() + action_idx];
    }
    std::span<const double> row(size_t video) const {
        return {scores.data() + video * action_ids.size(), action_ids.size()};
    }
};

struct Prediction {
    std::string video_id;
    uint32_t action_id = 0;
    double score = 0.0;
    Method method = Method::compositions;
};

/// Eq. 4: sum over selected compositions of s(c,a) * p(c_o|v) * p(c_s|v),
/// optionally times cos(phi_o, phi_s) when weight_mode is in_scoring.
double score_action(const CompositionSpace& space, std::span<const float> objects_row,
                    std::span<const float> scenes_row, const ActionCompositionSet& set,
                    WeightMode weight_mode, bool clip_similarities);

double score_single_source(std::span<const float> row,
                           std::span<const SingleSelected> selected, bool clip_similarities);

/// Concatenation baseline: label ids below `object_count` read the object
/// row, the rest read the scene row at id - object_count. Rows keep their
/// own normalization (the combined row sums to 2).
double score_concatenation(std::span<const float> objects_row, std::span<const float> scenes_row,
                           size_t object_count, std::span<const SingleSelected> selected,
                           bool clip_similarities);

double score_late_fusion(double object_score, double scene_score);

/// Argmax over a video's score row; ties resolve to the lowest action id.
Prediction predict(const ScoreMatrix& scores, const std::string& video_id, Method method);
std::vector<Prediction> predict_all(const ScoreMatrix& scores, Method method);

struct ClassifyInputs {
    Method method = Method::compositions;
    const CompositionSpace* space = nullptr;      // composition methods
    const EmbeddingTable* objects = nullptr;      // single-source paths
    const EmbeddingTable* scenes = nullptr;
    const EmbeddingTable* actions = nullptr;
    const Vocabulary* action_vocab = nullptr;
    const ProbabilityMatrix* object_probs = nullptr;
    const ProbabilityMatrix* scene_probs = nullptr;
    SelectionConfig selection;                    // composition methods
    uint32_t k_objects = 100;
    uint32_t k_scenes = 5;
    uint32_t k_concatenation = 100;
    bool clip_similarities = false;
    int threads = 1;
};

struct ClassifyResult {
    ScoreMatrix scores;
    std::vector<Prediction> predictions;
    std::vector<ActionCompositionSet> sets; // composition methods only
};

/// Scores every video against every action with the requested method and
/// returns the score matrix plus per-video argmax predictions.
ClassifyResult classify_batch(const ClassifyInputs& in);

} // namespace zscomp
