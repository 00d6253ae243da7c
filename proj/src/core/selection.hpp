#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/composition.hpp"

namespace zscomp {

enum class SelectionMode { plain, mmr };

struct SelectionConfig {
    uint32_t k = 250;
    double lambda = 0.75;
    bool diversify = true;
    // 0 selects the default pool max(50k, 5000); -1 means the full space.
    int64_t pool_size = 0;
    bool weight_in_selection = false;
};

struct SelectedMember {
    CompositionRef ref;
    double similarity = 0.0; // s(c,a), what Eq. 4 consumes
    double relevance = 0.0;  // ranking key; similarity, or s*w when weighted
    double mmr_score = 0.0;  // greedy objective at pick time; relevance in plain mode
};

struct ActionCompositionSet {
    uint32_t action_id = 0;
    SelectionMode mode = SelectionMode::plain;
    std::vector<SelectedMember> members;
};

size_t default_pool_size(uint32_t k);

/// Top-k by relevance, similarity descending with (object_id, scene_id)
/// ascending tie-break. Bounded-heap selection; the stream is never sorted
/// in full.
ActionCompositionSet select_top_k_plain(const CompositionSpace& space,
                                        std::span<const float> action_vec, uint32_t action_id,
                                        uint32_t k, bool weight_in_selection = false);

/// Greedy MMR: seed with the most relevant composition, then repeatedly add
///   argmax  lambda * rel(c') - (1 - lambda) * max_{c'' selected} s(c', c'')
/// over a relevance-ranked candidate pool. The pairwise max is maintained
/// incrementally against the latest pick only.
ActionCompositionSet select_top_k_mmr(const CompositionSpace& space,
                                      std::span<const float> action_vec, uint32_t action_id,
                                      const SelectionConfig& config);

/// Dispatches on config.diversify.
ActionCompositionSet select_compositions(const CompositionSpace& space,
                                         std::span<const float> action_vec, uint32_t action_id,
                                         const SelectionConfig& config);

struct SingleSelected {
    uint32_t label_id = 0;
    double similarity = 0.0;
};

/// Top-k single-source labels by cosine to the action vector.
std::vector<SingleSelected> select_top_k_single(const EmbeddingTable& table,
                                                std::span<const float> action_vec, uint32_t k);

} // namespace zscomp
