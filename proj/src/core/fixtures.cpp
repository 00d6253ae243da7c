#include "core/fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "core/composition.hpp"
#include "core/error.hpp"
#include "core/inference.hpp"
#include "core/rng.hpp"

namespace zscomp {

namespace {

void unit_vector(SplitMix64& gen, size_t dim, float* out) {
    for (;;) {
        double norm2 = 0.0;
        std::vector<double> v(dim);
        for (size_t d = 0; d < dim; ++d) {
            v[d] = gen.centered();
            norm2 += v[d] * v[d];
        }
        if (norm2 < 1e-12) continue;
        double inv = 1.0 / std::sqrt(norm2);
        for (size_t d = 0; d < dim; ++d) out[d] = static_cast<float>(v[d] * inv);
        return;
    }
}

// Planted (object, scene) pair per action. Consecutive action pairs
// alternate between sharing the object and sharing the scene so neither
// single source can separate them on its own.
void plant_pairs(const FixtureSpec& spec, std::vector<uint32_t>& obj_of,
                 std::vector<uint32_t>& scn_of) {
    obj_of.resize(spec.actions);
    scn_of.resize(spec.actions);
    uint32_t next_obj = 0, next_scn = 0;
    auto take_obj = [&] { return next_obj++ % spec.objects; };
    auto take_scn = [&] { return next_scn++ % spec.scenes; };
    uint32_t a = 0;
    uint32_t pair = 0;
    while (a < spec.actions) {
        if (a + 1 < spec.actions) {
            if (pair % 2 == 0) {
                uint32_t o = take_obj();
                obj_of[a] = o;
                scn_of[a] = take_scn();
                obj_of[a + 1] = o;
                scn_of[a + 1] = take_scn();
            } else {
                uint32_t s = take_scn();
                obj_of[a] = take_obj();
                scn_of[a] = s;
                obj_of[a + 1] = take_obj();
                scn_of[a + 1] = s;
            }
            a += 2;
            ++pair;
        } else {
            obj_of[a] = take_obj();
            scn_of[a] = take_scn();
            ++a;
        }
    }
}

std::vector<float> probability_row(SplitMix64& gen, uint32_t n, uint32_t boosted, double boost) {
    std::vector<double> row(n);
    double sum = 0.0;
    for (uint32_t i = 0; i < n; ++i) {
        row[i] = 0.05 + 0.10 * gen.unit();
        sum += row[i];
    }
    double extra = boost + 0.5 * gen.unit();
    row[boosted] += extra;
    sum += extra;
    if (n > 1) {
        // One distractor per row keeps the single-source baselines honest.
        uint32_t d = static_cast<uint32_t>((boosted + 1 + gen.below(n - 1)) % n);
        double noise = 0.4 + 0.4 * gen.unit();
        row[d] += noise;
        sum += noise;
    }
    std::vector<float> out(n);
    double inv = 1.0 / sum;
    for (uint32_t i = 0; i < n; ++i) out[i] = static_cast<float>(row[i] * inv);
    return out;
}

Fixture generate_once(const FixtureSpec& spec, uint64_t attempt_seed) {
    Fixture fx;
    fx.spec = spec;
    SplitMix64 gen(attempt_seed);

    fx.objects = Vocabulary::from_labels(SourceKind::objects,
                                         fixture_labels("object", spec.objects, 3));
    fx.scenes = Vocabulary::from_labels(SourceKind::scenes,
                                        fixture_labels("scene", spec.scenes, 3));
    fx.actions = Vocabulary::from_labels(SourceKind::actions,
                                         fixture_labels("action", spec.actions, 2));

    const size_t dim = spec.dim;
    fx.object_vecs.resize(size_t(spec.objects) * dim);
    fx.scene_vecs.resize(size_t(spec.scenes) * dim);
    fx.action_vecs.resize(size_t(spec.actions) * dim);
    for (uint32_t o = 0; o < spec.objects; ++o)
        unit_vector(gen, dim, fx.object_vecs.data() + size_t(o) * dim);
    for (uint32_t s = 0; s < spec.scenes; ++s)
        unit_vector(gen, dim, fx.scene_vecs.data() + size_t(s) * dim);

    std::vector<uint32_t> obj_of, scn_of;
    plant_pairs(spec, obj_of, scn_of);

    for (uint32_t a = 0; a < spec.actions; ++a) {
        const float* vo = fx.object_vecs.data() + size_t(obj_of[a]) * dim;
        const float* vs = fx.scene_vecs.data() + size_t(scn_of[a]) * dim;
        std::vector<double> v(dim);
        double norm2 = 0.0;
        for (size_t d = 0; d < dim; ++d) {
            v[d] = double(vo[d]) + double(vs[d]) + 0.35 * gen.centered();
            norm2 += v[d] * v[d];
        }
        double inv = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
        float* out = fx.action_vecs.data() + size_t(a) * dim;
        for (size_t d = 0; d < dim; ++d) out[d] = static_cast<float>(v[d] * inv);
    }

    fx.video_ids = fixture_labels("video", spec.videos, 4);
    fx.truth.resize(spec.videos);
    fx.object_probs.reserve(size_t(spec.videos) * spec.objects);
    fx.scene_probs.reserve(size_t(spec.videos) * spec.scenes);
    for (uint32_t v = 0; v < spec.videos; ++v) {
        uint32_t a = v % spec.actions;
        fx.truth[v] = a;
        auto orow = probability_row(gen, spec.objects, obj_of[a], 2.8);
        auto srow = probability_row(gen, spec.scenes, scn_of[a], 2.2);
        fx.object_probs.insert(fx.object_probs.end(), orow.begin(), orow.end());
        fx.scene_probs.insert(fx.scene_probs.end(), srow.begin(), srow.end());
    }

    size_t comps = size_t(spec.objects) * spec.scenes;
    fx.k_objects = std::min<uint32_t>(10, spec.objects);
    fx.k_scenes = std::min<uint32_t>(5, spec.scenes);
    fx.k_concatenation = std::min<uint32_t>(10, spec.objects + spec.scenes);
    fx.k_compositions = static_cast<uint32_t>(std::min<size_t>(25, comps));
    return fx;
}

// Accuracy of one method on the in-memory fixture.
double fixture_accuracy(const Fixture& fx, Method method, const EmbeddingTable& obj_t,
                        const EmbeddingTable& scn_t, const EmbeddingTable& act_t,
                        const CompositionSpace& space, const ProbabilityMatrix& obj_p,
                        const ProbabilityMatrix& scn_p, const GroundTruth& truth) {
    ClassifyInputs in;
    in.method = method;
    in.space = &space;
    in.objects = &obj_t;
    in.scenes = &scn_t;
    in.actions = &act_t;
    in.action_vocab = &fx.actions;
    in.object_probs = &obj_p;
    in.scene_probs = &scn_p;
    in.selection.k = fx.k_compositions;
    in.selection.lambda = 0.75;
    in.selection.diversify = true;
    in.selection.pool_size = -1;
    in.k_objects = fx.k_objects;
    in.k_scenes = fx.k_scenes;
    in.k_concatenation = fx.k_concatenation;
    in.threads = 1;
    auto result = classify_batch(in);
    return accuracy(result.predictions, truth);
}

} // namespace

std::vector<std::string> fixture_labels(const std::string& prefix, uint32_t count,
                                        uint32_t min_width) {
    size_t width = count > 0 ? std::to_string(count - 1).size() : 1;
    width = std::max<size_t>(width, min_width);
    std::vector<std::string> labels;
    labels.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        std::string digits = std::to_string(i);
        labels.push_back(prefix + std::string(width - digits.size(), '0') + digits);
    }
    return labels;
}

EmbeddingTable Fixture::object_table() const {
    return EmbeddingTable::from_rows(spec.dim, object_vecs, objects);
}
EmbeddingTable Fixture::scene_table() const {
    return EmbeddingTable::from_rows(spec.dim, scene_vecs, scenes);
}
EmbeddingTable Fixture::action_table() const {
    return EmbeddingTable::from_rows(spec.dim, action_vecs, actions);
}
ProbabilityMatrix Fixture::object_matrix() const {
    return ProbabilityMatrix::from_rows(video_ids, objects.size(), object_probs);
}
ProbabilityMatrix Fixture::scene_matrix() const {
    return ProbabilityMatrix::from_rows(video_ids, scenes.size(), scene_probs);
}
GroundTruth Fixture::ground_truth() const {
    std::vector<std::pair<std::string, uint32_t>> pairs;
    pairs.reserve(video_ids.size());
    for (size_t v = 0; v < video_ids.size(); ++v) pairs.emplace_back(video_ids[v], truth[v]);
    return GroundTruth::from_pairs(std::move(pairs), actions);
}

Fixture generate_fixture(const FixtureSpec& spec) {
    if (spec.objects == 0 || spec.scenes == 0 || spec.actions == 0)
        raise(ErrorKind::argument, "fixture needs at least one object, scene and action");
    if (spec.dim == 0) raise(ErrorKind::argument, "fixture dimension must be positive");

    const bool verifiable = spec.verify && spec.videos >= spec.actions && spec.actions >= 2 &&
                            spec.objects >= 2 && spec.scenes >= 2 &&
                            size_t(spec.objects) * spec.scenes <= 100000;
    for (uint32_t attempt = 0; attempt < std::max(1u, spec.max_attempts); ++attempt) {
        Fixture fx = generate_once(spec, mix_seed(spec.seed, attempt));
        fx.attempts_used = attempt + 1;
        if (!verifiable) return fx;

        auto obj_t = fx.object_table();
        auto scn_t = fx.scene_table();
        auto act_t = fx.action_table();
        CompositionSpace space(obj_t, scn_t);
        space.build_caches(1);
        auto obj_p = fx.object_matrix();
        auto scn_p = fx.scene_matrix();
        auto truth = fx.ground_truth();
        double comp = fixture_accuracy(fx, Method::compositions, obj_t, scn_t, act_t, space,
                                       obj_p, scn_p, truth);
        double objs = fixture_accuracy(fx, Method::object_only, obj_t, scn_t, act_t, space,
                                       obj_p, scn_p, truth);
        double scns = fixture_accuracy(fx, Method::scene_only, obj_t, scn_t, act_t, space,
                                       obj_p, scn_p, truth);
        if (comp > objs && comp > scns) {
            fx.verified = true;
            return fx;
        }
    }
    raise(ErrorKind::data, "could not generate a fixture where compositions beat both "
                           "baselines within " +
                               std::to_string(std::max(1u, spec.max_attempts)) + " attempts");
}

} // namespace zscomp
