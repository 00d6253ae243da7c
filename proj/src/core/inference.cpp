#include "core/inference.hpp"

#include <cmath>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace zscomp {

namespace {

double clipped(double s, bool clip) { return clip && s < 0.0 ? 0.0 : s; }

void require(const void* p, const char* what) {
    if (!p) raise(ErrorKind::argument, std::string(what) + " is required for this method");
}

// Qualified union table for the concatenation baseline: object rows first,
// then scene rows; ids stay distinct even when labels collide.
struct UnionTable {
    EmbeddingTable table;
    Vocabulary vocab;
};

UnionTable build_union(const EmbeddingTable& objects, const EmbeddingTable& scenes,
                       const Vocabulary& object_vocab, const Vocabulary& scene_vocab) {
    if (objects.dim() != scenes.dim())
        raise(ErrorKind::schema, "object and scene embeddings differ in dimension");
    std::vector<std::string> labels;
    labels.reserve(objects.size() + scenes.size());
    for (uint32_t i = 0; i < object_vocab.size(); ++i)
        labels.push_back("object:" + object_vocab.label(i));
    for (uint32_t i = 0; i < scene_vocab.size(); ++i)
        labels.push_back("scene:" + scene_vocab.label(i));
    std::vector<float> rows;
    rows.reserve(labels.size() * objects.dim());
    for (uint32_t i = 0; i < objects.size(); ++i) {
        auto v = objects.vector(i);
        rows.insert(rows.end(), v.begin(), v.end());
    }
    for (uint32_t i = 0; i < scenes.size(); ++i) {
        auto v = scenes.vector(i);
        rows.insert(rows.end(), v.begin(), v.end());
    }
    UnionTable u{EmbeddingTable{}, Vocabulary::from_labels(SourceKind::generic, std::move(labels))};
    u.table = EmbeddingTable::from_rows(objects.dim(), std::move(rows), u.vocab);
    return u;
}

void check_same_videos(const ProbabilityMatrix& a, const ProbabilityMatrix& b) {
    if (a.video_ids() != b.video_ids())
        raise(ErrorKind::schema,
              "object and scene probability matrices must list the same videos in the same order");
}

} // namespace

const char* method_name(Method m) {
    switch (m) {
    case Method::compositions: return "compositions";
    case Method::compositions_weighted_scoring: return "compositions_weighted_scoring";
    case Method::compositions_weighted_selection: return "compositions_weighted_selection";
    case Method::object_only: return "object_only";
    case Method::scene_only: return "scene_only";
    case Method::concatenation: return "concatenation";
    case Method::late_fusion: return "late_fusion";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    for (Method m : {Method::compositions, Method::compositions_weighted_scoring,
                     Method::compositions_weighted_selection, Method::object_only,
                     Method::scene_only, Method::concatenation, Method::late_fusion})
        if (name == method_name(m)) return m;
    return std::nullopt;
}

bool method_is_compositional(Method m) {
    return m == Method::compositions || m == Method::compositions_weighted_scoring ||
           m == Method::compositions_weighted_selection;
}

bool method_uses_objects(Method m) { return m != Method::scene_only; }

bool method_uses_scenes(Method m) { return m != Method::object_only; }

double score_action(const CompositionSpace& space, std::span<const float> objects_row,
                    std::span<const float> scenes_row, const ActionCompositionSet& set,
                    WeightMode weight_mode, bool clip_similarities) {
    if (set.members.empty()) raise(ErrorKind::argument, "composition set is empty");
    if (objects_row.size() != space.object_count() || scenes_row.size() != space.scene_count())
        raise(ErrorKind::schema, "probability rows do not match the composition space");
    double acc = 0.0;
    for (const auto& m : set.members) {
        double p = composition_likelihood(objects_row, scenes_row, m.ref.object_id,
                                          m.ref.scene_id);
        double s = clipped(m.similarity, clip_similarities);
        if (weight_mode == WeightMode::in_scoring) s *= space.weight(m.ref);
        acc += s * p;
    }
    return acc;
}

double score_single_source(std::span<const float> row,
                           std::span<const SingleSelected> selected, bool clip_similarities) {
    if (selected.empty()) raise(ErrorKind::argument, "selected label list is empty");
    double acc = 0.0;
    for (const auto& m : selected) {
        if (m.label_id >= row.size())
            raise(ErrorKind::schema, "selected label id out of range for probability row");
        acc += clipped(m.similarity, clip_similarities) * row[m.label_id];
    }
    return acc;
}

double score_concatenation(std::span<const float> objects_row, std::span<const float> scenes_row,
                           size_t object_count, std::span<const SingleSelected> selected,
                           bool clip_similarities) {
    if (selected.empty()) raise(ErrorKind::argument, "selected label list is empty");
    if (objects_row.size() != object_count)
        raise(ErrorKind::schema, "object probability row does not match the union split");
    double acc = 0.0;
    for (const auto& m : selected) {
        double p;
        if (m.label_id < object_count) {
            p = objects_row[m.label_id];
        } else {
            size_t s = m.label_id - object_count;
            if (s >= scenes_row.size())
                raise(ErrorKind::schema, "selected label id out of range for probability rows");
            p = scenes_row[s];
        }
        acc += clipped(m.similarity, clip_similarities) * p;
    }
    return acc;
}

double score_late_fusion(double object_score, double scene_score) {
    return 0.5 * (object_score + scene_score);
}

Prediction predict(const ScoreMatrix& scores, const std::string& video_id, Method method) {
    for (size_t v = 0; v < scores.video_ids.size(); ++v)
        if (scores.video_ids[v] == video_id) {
            auto row = scores.row(v);
            size_t best = 0;
            for (size_t a = 1; a < row.size(); ++a)
                if (row[a] > row[best]) best = a;
            return {video_id, scores.action_ids[best], row[best], method};
        }
    raise(ErrorKind::lookup, "unknown video '" + video_id + "'");
}

std::vector<Prediction> predict_all(const ScoreMatrix& scores, Method method) {
    std::vector<Prediction> out;
    out.reserve(scores.video_ids.size());
    for (size_t v = 0; v < scores.video_ids.size(); ++v) {
        auto row = scores.row(v);
        if (row.empty()) raise(ErrorKind::argument, "score matrix has no actions");
        size_t best = 0;
        for (size_t a = 1; a < row.size(); ++a)
            if (row[a] > row[best]) best = a;
        out.push_back({scores.video_ids[v], scores.action_ids[best], row[best], method});
    }
    return out;
}

ClassifyResult classify_batch(const ClassifyInputs& in) {
    require(in.actions, "action embedding table");
    require(in.action_vocab, "action vocabulary");
    const size_t n_actions = in.action_vocab->size();
    if (n_actions == 0) raise(ErrorKind::argument, "action vocabulary is empty");
    if (in.actions->size() != n_actions)
        raise(ErrorKind::schema, "action embeddings do not match the action vocabulary");

    const bool compositional = method_is_compositional(in.method);
    const ProbabilityMatrix* reference_probs = nullptr;
    if (method_uses_objects(in.method)) {
        require(in.object_probs, "object probability matrix");
        reference_probs = in.object_probs;
    }
    if (method_uses_scenes(in.method)) {
        require(in.scene_probs, "scene probability matrix");
        if (!reference_probs) reference_probs = in.scene_probs;
    }
    if (method_uses_objects(in.method) && method_uses_scenes(in.method))
        check_same_videos(*in.object_probs, *in.scene_probs);

    ClassifyResult result;
    result.scores.video_ids = reference_probs->video_ids();
    result.scores.action_ids.resize(n_actions);
    for (uint32_t a = 0; a < n_actions; ++a) result.scores.action_ids[a] = a;
    const size_t n_videos = result.scores.video_ids.size();
    result.scores.scores.assign(n_videos * n_actions, 0.0);

    // Per-action supports, then per-video scoring; both loops write only to
    // their own slots so thread count never changes the outputs.
    if (compositional) {
        require(in.space, "composition space");
        if (in.object_probs->cols() != in.space->object_count() ||
            in.scene_probs->cols() != in.space->scene_count())
            raise(ErrorKind::schema, "probability matrices do not match the composition space");
        SelectionConfig sel = in.selection;
        if (in.method == Method::compositions_weighted_selection) sel.weight_in_selection = true;
        WeightMode wm = in.method == Method::compositions_weighted_scoring
                            ? WeightMode::in_scoring
                            : WeightMode::none;
        result.sets.resize(n_actions);
        parallel_for(0, n_actions, in.threads, [&](size_t a) {
            result.sets[a] = select_compositions(*in.space, in.actions->vector(uint32_t(a)),
                                                 static_cast<uint32_t>(a), sel);
        });
        parallel_for(0, n_videos, in.threads, [&](size_t v) {
            auto orow = in.object_probs->row(static_cast<uint32_t>(v));
            auto srow = in.scene_probs->row(static_cast<uint32_t>(v));
            try {
                for (size_t a = 0; a < n_actions; ++a)
                    result.scores.scores[v * n_actions + a] = score_action(
                        *in.space, orow, srow, result.sets[a], wm, in.clip_similarities);
            } catch (const Error& e) {
                raise(e.kind(),
                      "video '" + result.scores.video_ids[v] + "': " + e.what());
            }
        });
    } else if (in.method == Method::object_only || in.method == Method::scene_only) {
        const bool objects = in.method == Method::object_only;
        const EmbeddingTable* table = objects ? in.objects : in.scenes;
        const ProbabilityMatrix* probs = objects ? in.object_probs : in.scene_probs;
        require(table, objects ? "object embedding table" : "scene embedding table");
        if (probs->cols() != table->size())
            raise(ErrorKind::schema, "probability matrix does not match the embedding table");
        uint32_t k = std::min<uint32_t>(objects ? in.k_objects : in.k_scenes,
                                        static_cast<uint32_t>(table->size()));
        std::vector<std::vector<SingleSelected>> lists(n_actions);
        parallel_for(0, n_actions, in.threads, [&](size_t a) {
            lists[a] = select_top_k_single(*table, in.actions->vector(uint32_t(a)), k);
        });
        parallel_for(0, n_videos, in.threads, [&](size_t v) {
            auto row = probs->row(static_cast<uint32_t>(v));
            try {
                for (size_t a = 0; a < n_actions; ++a)
                    result.scores.scores[v * n_actions + a] =
                        score_single_source(row, lists[a], in.clip_similarities);
            } catch (const Error& e) {
                raise(e.kind(), "video '" + result.scores.video_ids[v] + "': " + e.what());
            }
        });
    } else if (in.method == Method::concatenation) {
        require(in.objects, "object embedding table");
        require(in.scenes, "scene embedding table");
        if (in.object_probs->cols() != in.objects->size() ||
            in.scene_probs->cols() != in.scenes->size())
            raise(ErrorKind::schema, "probability matrices do not match the embedding tables");
        // Vocabulary labels only qualify the union ids; original vocabs are
        // not needed, so synthesize positional ones.
        std::vector<std::string> olabels, slabels;
        for (uint32_t i = 0; i < in.objects->size(); ++i)
            olabels.push_back("o" + std::to_string(i));
        for (uint32_t i = 0; i < in.scenes->size(); ++i)
            slabels.push_back("s" + std::to_string(i));
        auto u = build_union(*in.objects, *in.scenes,
                             Vocabulary::from_labels(SourceKind::objects, std::move(olabels)),
                             Vocabulary::from_labels(SourceKind::scenes, std::move(slabels)));
        uint32_t k = std::min<uint32_t>(in.k_concatenation,
                                        static_cast<uint32_t>(u.table.size()));
        std::vector<std::vector<SingleSelected>> lists(n_actions);
        parallel_for(0, n_actions, in.threads, [&](size_t a) {
            lists[a] = select_top_k_single(u.table, in.actions->vector(uint32_t(a)), k);
        });
        const size_t object_count = in.objects->size();
        parallel_for(0, n_videos, in.threads, [&](size_t v) {
            auto orow = in.object_probs->row(static_cast<uint32_t>(v));
            auto srow = in.scene_probs->row(static_cast<uint32_t>(v));
            try {
                for (size_t a = 0; a < n_actions; ++a)
                    result.scores.scores[v * n_actions + a] = score_concatenation(
                        orow, srow, object_count, lists[a], in.clip_similarities);
            } catch (const Error& e) {
                raise(e.kind(), "video '" + result.scores.video_ids[v] + "': " + e.what());
            }
        });
    } else { // late_fusion
        ClassifyInputs obj_in = in;
        obj_in.method = Method::object_only;
        ClassifyInputs scn_in = in;
        scn_in.method = Method::scene_only;
        ClassifyResult obj = classify_batch(obj_in);
        ClassifyResult scn = classify_batch(scn_in);
        for (size_t i = 0; i < result.scores.scores.size(); ++i)
            result.scores.scores[i] =
                score_late_fusion(obj.scores.scores[i], scn.scores.scores[i]);
    }

    result.predictions = predict_all(result.scores, in.method);
    return result;
}

} // namespace zscomp
