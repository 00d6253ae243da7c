#include "core/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace zscomp {
namespace oracle {

namespace {

// All math below is written from the equations directly, on purpose; do not
// replace any of it with calls into the engine.

double naive_cosine(const std::vector<float>& u, const std::vector<float>& v) {
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        dot += double(u[i]) * v[i];
        nu += double(u[i]) * u[i];
        nv += double(v[i]) * v[i];
    }
    if (nu == 0.0 || nv == 0.0) return 0.0;
    double c = dot / (std::sqrt(nu) * std::sqrt(nv));
    return std::min(1.0, std::max(-1.0, c));
}

std::vector<std::vector<float>> copy_table(const EmbeddingTable& t, bool normalize) {
    std::vector<std::vector<float>> out(t.size());
    for (uint32_t i = 0; i < t.size(); ++i) {
        auto row = t.vector(i);
        out[i].assign(row.begin(), row.end());
        if (normalize) {
            double n = 0.0;
            for (float v : out[i]) n += double(v) * v;
            n = std::sqrt(n);
            if (n > 0.0)
                for (float& v : out[i]) v = static_cast<float>(v / n);
        }
    }
    return out;
}

std::vector<float> to_vec(std::span<const float> s) { return {s.begin(), s.end()}; }

struct Candidate {
    CompositionRef ref;
    std::vector<float> embedding;
    double relevance = 0.0; // ranking key (similarity, or similarity * weight)
    double similarity = 0.0;
};

double clip_maybe(double s, bool clip) { return clip && s < 0.0 ? 0.0 : s; }

} // namespace

Result pipeline(const EmbeddingTable& objects, const EmbeddingTable& scenes,
                const EmbeddingTable& actions, const ProbabilityMatrix* object_probs,
                const ProbabilityMatrix* scene_probs, const Config& config) {
    Result result;
    const size_t n_actions = actions.size();
    const bool compositional = method_is_compositional(config.method);

    auto ovecs = copy_table(objects, config.normalize_before_sum);
    auto svecs = copy_table(scenes, config.normalize_before_sum);

    // Composition methods: materialize the whole space.
    std::vector<Candidate> all;
    if (compositional) {
        if (objects.size() * scenes.size() > kMaxCompositions)
            raise(ErrorKind::size_guard, "oracle refuses more than 100000 compositions");
        for (uint32_t o = 0; o < objects.size(); ++o)
            for (uint32_t s = 0; s < scenes.size(); ++s) {
                if (config.exclude_self_pairs && o == s) continue;
                Candidate c;
                c.ref = {o, s};
                c.embedding.resize(objects.dim());
                for (size_t d = 0; d < objects.dim(); ++d)
                    c.embedding[d] = ovecs[o][d] + svecs[s][d];
                all.push_back(std::move(c));
            }
        result.sets.resize(n_actions);
    }

    // Single-source support lists per action.
    std::vector<std::vector<std::pair<uint32_t, double>>> obj_lists, scn_lists, cat_lists;

    auto rank_single = [&](const std::vector<std::vector<float>>& vecs,
                           const std::vector<float>& avec, uint32_t k) {
        std::vector<std::pair<uint32_t, double>> sims(vecs.size());
        for (uint32_t i = 0; i < vecs.size(); ++i) sims[i] = {i, naive_cosine(vecs[i], avec)};
        std::sort(sims.begin(), sims.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        sims.resize(std::min<size_t>(k, sims.size()));
        return sims;
    };

    for (uint32_t a = 0; a < n_actions; ++a) {
        std::vector<float> avec = to_vec(actions.vector(a));
        if (compositional) {
            std::vector<Candidate> ranked = all;
            for (auto& c : ranked) {
                c.similarity = naive_cosine(c.embedding, avec);
                c.relevance = c.similarity;
                if (config.method == Method::compositions_weighted_selection)
                    c.relevance = c.similarity * naive_cosine(ovecs[c.ref.object_id],
                                                              svecs[c.ref.scene_id]);
            }
            std::sort(ranked.begin(), ranked.end(), [](const Candidate& x, const Candidate& y) {
                if (x.relevance != y.relevance) return x.relevance > y.relevance;
                return x.ref < y.ref;
            });
            size_t pool = ranked.size();
            if (config.pool_size == 0)
                pool = std::min<size_t>(pool, std::max<size_t>(size_t{50} * config.k, 5000));
            else if (config.pool_size > 0)
                pool = std::min<size_t>(pool, size_t(config.pool_size));
            ranked.resize(pool);

            auto& set = result.sets[a];
            size_t want = std::min<size_t>(config.k, ranked.size());
            if (!config.diversify) {
                for (size_t i = 0; i < want; ++i)
                    set.push_back({ranked[i].ref, ranked[i].similarity, ranked[i].relevance});
            } else {
                // Exact MMR, recomputing the max term from scratch each round.
                // The seed is the most relevant composition by definition.
                std::vector<uint8_t> used(ranked.size(), 0);
                std::vector<size_t> chosen;
                if (want > 0) {
                    used[0] = 1;
                    chosen.push_back(0);
                    set.push_back({ranked[0].ref, ranked[0].similarity,
                                   config.lambda * ranked[0].relevance});
                }
                while (set.size() < want) {
                    size_t best = ranked.size();
                    double best_score = 0.0;
                    for (size_t i = 0; i < ranked.size(); ++i) {
                        if (used[i]) continue;
                        double max_sim = -std::numeric_limits<double>::infinity();
                        for (size_t j : chosen)
                            max_sim = std::max(
                                max_sim, naive_cosine(ranked[i].embedding, ranked[j].embedding));
                        double score = config.lambda * ranked[i].relevance -
                                       (1.0 - config.lambda) * max_sim;
                        if (best == ranked.size() || score > best_score ||
                            (score == best_score && ranked[i].ref < ranked[best].ref)) {
                            best = i;
                            best_score = score;
                        }
                    }
                    used[best] = 1;
                    chosen.push_back(best);
                    set.push_back({ranked[best].ref, ranked[best].similarity, best_score});
                }
            }
        }
        if (config.method == Method::object_only || config.method == Method::late_fusion)
            obj_lists.push_back(rank_single(ovecs, avec,
                                            std::min<uint32_t>(config.k_objects,
                                                               uint32_t(ovecs.size()))));
        if (config.method == Method::scene_only || config.method == Method::late_fusion)
            scn_lists.push_back(rank_single(svecs, avec,
                                            std::min<uint32_t>(config.k_scenes,
                                                               uint32_t(svecs.size()))));
        if (config.method == Method::concatenation) {
            std::vector<std::vector<float>> joint = ovecs;
            joint.insert(joint.end(), svecs.begin(), svecs.end());
            cat_lists.push_back(rank_single(joint, avec,
                                            std::min<uint32_t>(config.k_concatenation,
                                                               uint32_t(joint.size()))));
        }
    }

    // Scoring.
    const ProbabilityMatrix* ref_probs =
        config.method == Method::scene_only ? scene_probs : object_probs;
    if (!ref_probs) return result;
    result.video_ids = ref_probs->video_ids();
    const size_t n_videos = result.video_ids.size();
    result.scores.assign(n_videos * n_actions, 0.0);

    for (size_t v = 0; v < n_videos; ++v) {
        for (uint32_t a = 0; a < n_actions; ++a) {
            double score = 0.0;
            if (compositional) {
                auto orow = object_probs->row(uint32_t(v));
                auto srow = scene_probs->row(uint32_t(v));
                for (const auto& sel : result.sets[a]) {
                    double s = clip_maybe(sel.similarity, config.clip_similarities);
                    if (config.method == Method::compositions_weighted_scoring)
                        s *= naive_cosine(ovecs[sel.ref.object_id], svecs[sel.ref.scene_id]);
                    score += s * double(orow[sel.ref.object_id]) * double(srow[sel.ref.scene_id]);
                }
            } else if (config.method == Method::object_only) {
                auto row = object_probs->row(uint32_t(v));
                for (const auto& [id, sim] : obj_lists[a])
                    score += clip_maybe(sim, config.clip_similarities) * double(row[id]);
            } else if (config.method == Method::scene_only) {
                auto row = scene_probs->row(uint32_t(v));
                for (const auto& [id, sim] : scn_lists[a])
                    score += clip_maybe(sim, config.clip_similarities) * double(row[id]);
            } else if (config.method == Method::concatenation) {
                auto orow = object_probs->row(uint32_t(v));
                auto srow = scene_probs->row(uint32_t(v));
                for (const auto& [id, sim] : cat_lists[a]) {
                    double p = id < ovecs.size() ? double(orow[id])
                                                 : double(srow[id - ovecs.size()]);
                    score += clip_maybe(sim, config.clip_similarities) * p;
                }
            } else { // late_fusion
                auto orow = object_probs->row(uint32_t(v));
                auto srow = scene_probs->row(uint32_t(v));
                double so = 0.0, ss = 0.0;
                for (const auto& [id, sim] : obj_lists[a])
                    so += clip_maybe(sim, config.clip_similarities) * double(orow[id]);
                for (const auto& [id, sim] : scn_lists[a])
                    ss += clip_maybe(sim, config.clip_similarities) * double(srow[id]);
                score = (so + ss) / 2.0;
            }
            result.scores[v * n_actions + a] = score;
        }
    }

    result.predictions.resize(n_videos);
    for (size_t v = 0; v < n_videos; ++v) {
        const double* row = result.scores.data() + v * n_actions;
        uint32_t best = 0;
        for (uint32_t a = 1; a < n_actions; ++a)
            if (row[a] > row[best]) best = a;
        result.predictions[v] = best;
    }
    return result;
}

} // namespace oracle
} // namespace zscomp
