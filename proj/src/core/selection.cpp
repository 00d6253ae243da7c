#include "core/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"
#include "core/topk.hpp"

namespace zscomp {

namespace {

struct RankedBetter {
    bool operator()(const SelectedMember& a, const SelectedMember& b) const {
        if (a.relevance != b.relevance) return a.relevance > b.relevance;
        return a.ref < b.ref;
    }
};

std::vector<SelectedMember> plain_top(const CompositionSpace& space,
                                      const CompositionSpace::ActionContext& ctx, size_t k,
                                      bool weighted) {
    BoundedTopK<SelectedMember, RankedBetter> top(k);
    space.score_all(ctx, [&](CompositionRef c, double sim) {
        SelectedMember m;
        m.ref = c;
        m.similarity = sim;
        m.relevance = weighted ? sim * space.weight(c) : sim;
        m.mmr_score = m.relevance;
        top.push(m);
    });
    return std::move(top).take_sorted();
}

void validate(const CompositionSpace& space, std::span<const float> action_vec, uint32_t k) {
    if (k < 1) raise(ErrorKind::argument, "k must be at least 1");
    if (action_vec.size() != space.dim())
        raise(ErrorKind::argument, "action vector dimension does not match composition space");
}

} // namespace

size_t default_pool_size(uint32_t k) { return std::max<size_t>(size_t{50} * k, 5000); }

ActionCompositionSet select_top_k_plain(const CompositionSpace& space,
                                        std::span<const float> action_vec, uint32_t action_id,
                                        uint32_t k, bool weight_in_selection) {
    validate(space, action_vec, k);
    auto ctx = space.prepare_action(action_vec);
    ActionCompositionSet set;
    set.action_id = action_id;
    set.mode = SelectionMode::plain;
    set.members = plain_top(space, ctx, k, weight_in_selection);
    return set;
}

ActionCompositionSet select_top_k_mmr(const CompositionSpace& space,
                                      std::span<const float> action_vec, uint32_t action_id,
                                      const SelectionConfig& config) {
    validate(space, action_vec, config.k);
    if (config.lambda < 0.0 || config.lambda > 1.0)
        raise(ErrorKind::config, "lambda must be in [0, 1], got " +
                                     std::to_string(config.lambda));
    size_t pool_size;
    if (config.pool_size < 0) {
        pool_size = space.composition_count();
    } else if (config.pool_size == 0) {
        pool_size = default_pool_size(config.k);
    } else {
        pool_size = static_cast<size_t>(config.pool_size);
    }
    if (pool_size < config.k)
        raise(ErrorKind::config, "pool_size " + std::to_string(pool_size) +
                                     " is smaller than k = " + std::to_string(config.k));

    auto ctx = space.prepare_action(action_vec);
    std::vector<SelectedMember> pool = plain_top(space, ctx, pool_size, config.weight_in_selection);

    const double lambda = config.lambda;
    const size_t want = std::min<size_t>(config.k, pool.size());
    ActionCompositionSet set;
    set.action_id = action_id;
    set.mode = SelectionMode::mmr;
    set.members.reserve(want);
    if (pool.empty()) return set;

    std::vector<uint8_t> taken(pool.size(), 0);
    const bool track_diversity = lambda < 1.0;
    // Max pairwise similarity of each candidate to the selected set so far.
    // Starts unset; the first fold assigns the seed similarity, which may be
    // negative. With lambda = 1 the term is unused and stays 0.
    std::vector<double> max_sim(pool.size(),
                                track_diversity ? -std::numeric_limits<double>::infinity() : 0.0);
    std::vector<double> obj_dots(space.object_count(), 0.0);
    std::vector<double> scn_dots(space.scene_count(), 0.0);
    std::vector<uint32_t> pool_objects, pool_scenes;
    if (track_diversity) {
        pool_objects.reserve(pool.size());
        pool_scenes.reserve(pool.size());
        std::vector<uint8_t> seen_o(space.object_count(), 0), seen_s(space.scene_count(), 0);
        for (const auto& m : pool) {
            if (!seen_o[m.ref.object_id]) {
                seen_o[m.ref.object_id] = 1;
                pool_objects.push_back(m.ref.object_id);
            }
            if (!seen_s[m.ref.scene_id]) {
                seen_s[m.ref.scene_id] = 1;
                pool_scenes.push_back(m.ref.scene_id);
            }
        }
    }

    // Seed: the pool is relevance-sorted, so index 0 is the global argmax.
    size_t last = 0;
    taken[0] = 1;
    {
        SelectedMember seed = pool[0];
        seed.mmr_score = lambda * seed.relevance;
        set.members.push_back(seed);
    }

    std::vector<float> summed(space.dim());
    while (set.members.size() < want) {
        if (track_diversity) {
            // Fold the latest pick into every candidate's running max via
            // <phi(c'), phi_o + phi_s of the pick>, split per component.
            const CompositionRef picked = pool[last].ref;
            auto vo = space.object_vector(picked.object_id);
            auto vs = space.scene_vector(picked.scene_id);
            for (size_t d = 0; d < space.dim(); ++d) summed[d] = vo[d] + vs[d];
            double picked_norm = space.pair_norm(picked.object_id, picked.scene_id);
            for (uint32_t o : pool_objects) {
                auto v = space.object_vector(o);
                double acc = 0.0;
                for (size_t d = 0; d < space.dim(); ++d)
                    acc += static_cast<double>(v[d]) * summed[d];
                obj_dots[o] = acc;
            }
            for (uint32_t s : pool_scenes) {
                auto v = space.scene_vector(s);
                double acc = 0.0;
                for (size_t d = 0; d < space.dim(); ++d)
                    acc += static_cast<double>(v[d]) * summed[d];
                scn_dots[s] = acc;
            }
            for (size_t i = 0; i < pool.size(); ++i) {
                if (taken[i]) continue;
                const CompositionRef c = pool[i].ref;
                double denom =
                    static_cast<double>(space.pair_norm(c.object_id, c.scene_id)) * picked_norm;
                double sim = 0.0;
                if (denom > 0.0) {
                    sim = (obj_dots[c.object_id] + scn_dots[c.scene_id]) / denom;
                    if (sim > 1.0) sim = 1.0;
                    if (sim < -1.0) sim = -1.0;
                }
                if (sim > max_sim[i]) max_sim[i] = sim;
            }
        }

        size_t best = pool.size();
        double best_score = 0.0;
        for (size_t i = 0; i < pool.size(); ++i) {
            if (taken[i]) continue;
            double score = lambda * pool[i].relevance - (1.0 - lambda) * max_sim[i];
            if (best == pool.size() || score > best_score ||
                (score == best_score && pool[i].ref < pool[best].ref)) {
                best = i;
                best_score = score;
            }
        }
        taken[best] = 1;
        last = best;
        SelectedMember m = pool[best];
        m.mmr_score = best_score;
        set.members.push_back(m);
    }
    return set;
}

ActionCompositionSet select_compositions(const CompositionSpace& space,
                                         std::span<const float> action_vec, uint32_t action_id,
                                         const SelectionConfig& config) {
    if (config.diversify) return select_top_k_mmr(space, action_vec, action_id, config);
    auto set = select_top_k_plain(space, action_vec, action_id, config.k,
                                  config.weight_in_selection);
    return set;
}

std::vector<SingleSelected> select_top_k_single(const EmbeddingTable& table,
                                                std::span<const float> action_vec, uint32_t k) {
    if (k < 1) raise(ErrorKind::argument, "k must be at least 1");
    if (table.size() == 0) raise(ErrorKind::argument, "vocabulary is empty");
    if (action_vec.size() != table.dim())
        raise(ErrorKind::argument, "action vector dimension does not match embedding table");
    struct Better {
        bool operator()(const SingleSelected& a, const SingleSelected& b) const {
            if (a.similarity != b.similarity) return a.similarity > b.similarity;
            return a.label_id < b.label_id;
        }
    };
    BoundedTopK<SingleSelected, Better> top(k);
    for (uint32_t i = 0; i < table.size(); ++i)
        top.push({i, cosine(table.vector(i), action_vec)});
    return std::move(top).take_sorted();
}

} // namespace zscomp
