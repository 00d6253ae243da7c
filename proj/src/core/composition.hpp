#pragma once

#include <atomic>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/embedding.hpp"

namespace zscomp {

/// One object-scene pair, value-ordered by (object_id, scene_id).
struct CompositionRef {
    uint32_t object_id = 0;
    uint32_t scene_id = 0;
    friend auto operator<=>(const CompositionRef&, const CompositionRef&) = default;
};

struct SpaceOptions {
    bool normalize_before_sum = false;
    bool exclude_self_pairs = false;
};

/// The Cartesian composition space O x S, held lazily: per-composition
/// embeddings are never materialized. Similarities use the decomposition
///   cos(phi_o + phi_s, phi_a) = (<phi_o,phi_a> + <phi_s,phi_a>)
///                               / (pair_norm(o,s) * ||phi_a||)
/// with pair_norm^2 = ||phi_o||^2 + ||phi_s||^2 + 2<phi_o,phi_s> cached as
/// f32 alongside the cross dots. Immutable once caches are built.
class CompositionSpace {
  public:
    CompositionSpace(const EmbeddingTable& objects, const EmbeddingTable& scenes,
                     SpaceOptions options = {});

    size_t object_count() const { return n_obj_; }
    size_t scene_count() const { return n_scn_; }
    size_t dim() const { return dim_; }
    bool self_pairs_excluded() const { return exclude_self_; }
    bool skipped(uint32_t o, uint32_t s) const { return exclude_self_ && o == s; }
    size_t composition_count() const;

    std::span<const float> object_vector(uint32_t o) const {
        return {obj_vecs_.data() + static_cast<size_t>(o) * dim_, dim_};
    }
    std::span<const float> scene_vector(uint32_t s) const {
        return {scn_vecs_.data() + static_cast<size_t>(s) * dim_, dim_};
    }
    double object_norm(uint32_t o) const { return obj_norms_[o]; }
    double scene_norm(uint32_t s) const { return scn_norms_[s]; }

    void build_caches(int threads);
    bool caches_built() const { return !pair_norms_.empty(); }
    void save_cache(const std::string& path) const;
    void load_cache(const std::string& path);
    float pair_norm(uint32_t o, uint32_t s) const { return pair_norms_[size_t(o) * n_scn_ + s]; }
    float cross_dot(uint32_t o, uint32_t s) const { return cross_dots_[size_t(o) * n_scn_ + s]; }

    std::vector<float> composition_embedding(CompositionRef c) const;

    /// Per-action dot vectors reused across the whole composition stream.
    struct ActionContext {
        std::vector<double> object_dots;
        std::vector<double> scene_dots;
        double action_norm = 0.0;
    };
    ActionContext prepare_action(std::span<const float> action_vec) const;
    double similarity_from(const ActionContext& ctx, uint32_t o, uint32_t s) const;

    // One-off decomposed similarity; works without caches.
    double action_similarity(CompositionRef c, std::span<const float> action_vec) const;
    double pair_similarity(CompositionRef c1, CompositionRef c2) const;
    double weight(CompositionRef c) const; // cos(phi_o, phi_s)

    /// Row-major (object-major) enumeration, skipping excluded self pairs.
    template <typename Fn>
    void for_each_composition(Fn&& fn) const {
        for (uint32_t o = 0; o < n_obj_; ++o)
            for (uint32_t s = 0; s < n_scn_; ++s) {
                if (exclude_self_ && o == s) continue;
                fn(CompositionRef{o, s});
            }
    }

    /// Streams (ref, similarity) for the whole space in enumeration order.
    template <typename Sink>
    void score_all(const ActionContext& ctx, Sink&& sink) const {
        for_each_composition(
            [&](CompositionRef c) { sink(c, similarity_from(ctx, c.object_id, c.scene_id)); });
    }

    uint64_t degenerate_count() const { return degenerate_.load(std::memory_order_relaxed); }
    void reset_degenerate_count() { degenerate_.store(0, std::memory_order_relaxed); }

  private:
    void check_ids(CompositionRef c) const;
    double flag_degenerate() const;

    size_t dim_ = 0;
    size_t n_obj_ = 0;
    size_t n_scn_ = 0;
    bool exclude_self_ = false;
    std::vector<float> obj_vecs_, scn_vecs_;
    std::vector<float> obj_norms_, scn_norms_;
    std::vector<float> pair_norms_, cross_dots_;
    mutable std::atomic<uint64_t> degenerate_{0};
};

} // namespace zscomp
