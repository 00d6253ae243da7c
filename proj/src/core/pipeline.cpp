#include "core/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "core/composition.hpp"
#include "core/embedding.hpp"
#include "core/error.hpp"
#include "core/evaluation.hpp"
#include "core/fixtures.hpp"
#include "core/inference.hpp"
#include "core/oracle.hpp"
#include "core/parallel.hpp"
#include "core/probability.hpp"
#include "core/runconfig.hpp"
#include "core/selection.hpp"
#include "core/text.hpp"
#include "core/vocab.hpp"

namespace zscomp {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string hex_hash(uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string pad_id(uint32_t id, size_t width) {
    std::string s = std::to_string(id);
    if (s.size() < width) s.insert(0, width - s.size(), '0');
    return s;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) raise(ErrorKind::io, "cannot create directory '" + dir + "': " + ec.message());
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::io, "cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) raise(ErrorKind::io, "failed writing '" + path + "'");
}

void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

// What a command has to load; derived from the method(s) it will run.
struct Needs {
    bool objects = false;
    bool scenes = false;
    bool actions = true;
    bool object_probs = false;
    bool scene_probs = false;
    bool space = false;
    bool truth = false;
};

void fold_method(Needs& n, Method m, bool with_probs) {
    n.objects |= method_uses_objects(m);
    n.scenes |= method_uses_scenes(m);
    n.space |= method_is_compositional(m);
    if (with_probs) {
        n.object_probs |= method_uses_objects(m);
        n.scene_probs |= method_uses_scenes(m);
    }
}

Needs needs_for(const RunConfig& c, const std::string& command) {
    Needs n;
    if (command == "ablate") {
        n.objects = n.scenes = n.object_probs = n.scene_probs = n.space = n.truth = true;
        return n;
    }
    fold_method(n, c.method, command != "select");
    if (command == "evaluate") {
        n.truth = true;
        if (c.baseline_method) fold_method(n, *c.baseline_method, true);
    }
    return n;
}

struct Bundle {
    Vocabulary object_vocab, scene_vocab, action_vocab;
    std::optional<EmbeddingTable> objects, scenes, actions;
    std::optional<ProbabilityMatrix> object_probs, scene_probs;
    std::optional<CompositionSpace> space;
    std::optional<GroundTruth> truth;
};

// Fills in place; Bundle is pinned because CompositionSpace is not movable.
void load_bundle(Bundle& b, const RunConfig& c, const Needs& n, int threads) {
    if (n.actions) {
        b.action_vocab = Vocabulary::load(c.actions_vocab, SourceKind::actions);
        b.actions = EmbeddingTable::load(c.actions_embeddings,
                                         c.embedding_format_for(c.actions_embeddings),
                                         b.action_vocab, c.oov());
    }
    if (n.objects) {
        b.object_vocab = Vocabulary::load(c.objects_vocab, SourceKind::objects);
        b.objects = EmbeddingTable::load(c.objects_embeddings,
                                         c.embedding_format_for(c.objects_embeddings),
                                         b.object_vocab, c.oov());
    }
    if (n.scenes) {
        b.scene_vocab = Vocabulary::load(c.scenes_vocab, SourceKind::scenes);
        b.scenes = EmbeddingTable::load(c.scenes_embeddings,
                                        c.embedding_format_for(c.scenes_embeddings),
                                        b.scene_vocab, c.oov());
    }
    if (n.object_probs)
        b.object_probs = ProbabilityMatrix::load(
            c.objects_probabilities, c.probability_format_for(c.objects_probabilities),
            b.object_vocab, c.renormalize);
    if (n.scene_probs)
        b.scene_probs = ProbabilityMatrix::load(
            c.scenes_probabilities, c.probability_format_for(c.scenes_probabilities),
            b.scene_vocab, c.renormalize);
    if (n.space) {
        SpaceOptions opts;
        opts.normalize_before_sum = c.normalize_before_sum;
        opts.exclude_self_pairs = c.exclude_self_pairs;
        b.space.emplace(*b.objects, *b.scenes, opts);
        bool have_cache = false;
        if (!c.cache_file.empty() && fs::exists(c.cache_file)) {
            b.space->load_cache(c.cache_file);
            have_cache = true;
        }
        if (!have_cache) {
            b.space->build_caches(threads);
            if (!c.cache_file.empty()) b.space->save_cache(c.cache_file);
        }
    }
    if (n.truth) b.truth = GroundTruth::load(c.ground_truth, b.action_vocab);
}

ClassifyInputs make_inputs(const RunConfig& c, const Bundle& b, Method m, int threads) {
    ClassifyInputs in;
    in.method = m;
    in.space = b.space ? &*b.space : nullptr;
    in.objects = b.objects ? &*b.objects : nullptr;
    in.scenes = b.scenes ? &*b.scenes : nullptr;
    in.actions = &*b.actions;
    in.action_vocab = &b.action_vocab;
    in.object_probs = b.object_probs ? &*b.object_probs : nullptr;
    in.scene_probs = b.scene_probs ? &*b.scene_probs : nullptr;
    in.selection.k = c.k_compositions;
    in.selection.lambda = c.lambda;
    in.selection.diversify = c.diversify;
    in.selection.pool_size = c.pool_value();
    in.selection.weight_in_selection = m == Method::compositions_weighted_selection;
    in.k_objects = c.k_objects;
    in.k_scenes = c.k_scenes;
    in.k_concatenation = c.k_concatenation;
    in.clip_similarities = c.clip_similarities;
    in.threads = threads;
    return in;
}

std::string selection_csv(const ActionCompositionSet& set, const std::string& action_label,
                          const Vocabulary& objects, const Vocabulary& scenes) {
    std::string out = "action_label,rank,object_label,scene_label,similarity,mmr_score\n";
    uint32_t rank = 1;
    for (const auto& m : set.members) {
        out += csv_escape(action_label);
        out += ',';
        out += std::to_string(rank++);
        out += ',';
        out += csv_escape(objects.label(m.ref.object_id));
        out += ',';
        out += csv_escape(scenes.label(m.ref.scene_id));
        out += ',';
        out += format_real(m.similarity);
        out += ',';
        out += format_real(m.mmr_score);
        out += '\n';
    }
    return out;
}

std::string scores_csv(const ScoreMatrix& s, const Vocabulary& actions) {
    std::string out = "video_id,action_label,score\n";
    for (size_t v = 0; v < s.video_ids.size(); ++v) {
        for (size_t a = 0; a < s.action_ids.size(); ++a) {
            out += csv_escape(s.video_ids[v]);
            out += ',';
            out += csv_escape(actions.label(s.action_ids[a]));
            out += ',';
            out += format_real(s.at(v, a));
            out += '\n';
        }
    }
    return out;
}

std::string predictions_csv(const std::vector<Prediction>& preds, const Vocabulary& actions) {
    std::string out = "video_id,predicted_action,score\n";
    for (const auto& p : preds) {
        out += csv_escape(p.video_id);
        out += ',';
        out += csv_escape(actions.label(p.action_id));
        out += ',';
        out += format_real(p.score);
        out += '\n';
    }
    return out;
}

std::string trials_csv(const TrialReport& r) {
    std::string out = "trial,subset_hash,num_videos,accuracy\n";
    for (const auto& t : r.trials) {
        out += std::to_string(t.trial);
        out += ',';
        out += hex_hash(t.subset_hash);
        out += ',';
        out += std::to_string(t.num_videos);
        out += ',';
        if (t.defined) out += format_real(t.accuracy);
        out += '\n';
    }
    return out;
}

std::string delta_csv(const std::vector<ActionDelta>& rows, const Vocabulary& actions) {
    std::string out = "action_label,video_count,method_accuracy,baseline_accuracy,delta\n";
    for (const auto& d : rows) {
        out += csv_escape(actions.label(d.action_id));
        out += ',';
        out += std::to_string(d.video_count);
        out += ',';
        out += format_real(d.accuracy_a);
        out += ',';
        out += format_real(d.accuracy_b);
        out += ',';
        out += format_real(d.delta);
        out += '\n';
    }
    return out;
}

json trial_report_json(const TrialReport& r) {
    json t;
    t["subset_size"] = r.subset_size;
    t["num_trials"] = r.num_trials;
    t["seed"] = r.seed;
    t["mean_accuracy"] = r.mean;
    t["std_accuracy"] = r.stddev;
    t["stddev_kind"] = "population";
    t["per_trial_accuracy"] = r.per_trial_accuracy;
    json rows = json::array();
    for (const auto& row : r.trials) {
        json x;
        x["trial"] = row.trial;
        x["subset_hash"] = hex_hash(row.subset_hash);
        x["num_videos"] = row.num_videos;
        x["defined"] = row.defined;
        if (row.defined) x["accuracy"] = row.accuracy;
        rows.push_back(std::move(x));
    }
    t["trials"] = std::move(rows);
    if (!r.warnings.empty()) t["warnings"] = r.warnings;
    return t;
}

uint64_t space_degenerate(const Bundle& b) {
    return b.space ? b.space->degenerate_count() : 0;
}

json cmd_select(const RunConfig& c) {
    int threads = resolve_threads(c.threads);
    Bundle b;
    load_bundle(b, c, needs_for(c, "select"), threads);
    size_t action_count = b.action_vocab.size();

    SelectionConfig sel;
    sel.k = c.k_compositions;
    sel.lambda = c.lambda;
    sel.diversify = c.diversify;
    sel.pool_size = c.pool_value();
    sel.weight_in_selection = c.method == Method::compositions_weighted_selection;

    std::vector<ActionCompositionSet> sets(action_count);
    parallel_for(0, action_count, threads, [&](size_t a) {
        auto id = static_cast<uint32_t>(a);
        sets[a] = select_compositions(*b.space, b.actions->vector(id), id, sel);
    });

    ensure_dir(c.output_dir);
    std::string sel_dir = join_path(c.output_dir, "selections");
    ensure_dir(sel_dir);
    json files = json::array();
    for (size_t a = 0; a < action_count; ++a) {
        const std::string& label = b.action_vocab.label(static_cast<uint32_t>(a));
        std::string name = "action_" + pad_id(static_cast<uint32_t>(a), 4) + "_" +
                           slugify(label) + ".csv";
        write_text_file(join_path(sel_dir, name),
                        selection_csv(sets[a], label, b.object_vocab, b.scene_vocab));
        json f;
        f["action_id"] = a;
        f["action_label"] = label;
        f["file"] = "selections/" + name;
        f["members"] = sets[a].members.size();
        files.push_back(std::move(f));
    }

    json manifest;
    manifest["command"] = "select";
    manifest["config"] = echo_config(c, "select");
    manifest["actions"] = std::move(files);
    manifest["degenerate_similarities"] = space_degenerate(b);
    write_json_file(join_path(c.output_dir, "manifest.json"), manifest);

    json summary;
    summary["command"] = "select";
    summary["method"] = method_name(c.method);
    summary["actions"] = action_count;
    summary["compositions"] = b.space->composition_count();
    summary["output_dir"] = c.output_dir;
    return summary;
}

json cmd_classify(const RunConfig& c) {
    int threads = resolve_threads(c.threads);
    Bundle b;
    load_bundle(b, c, needs_for(c, "classify"), threads);
    ClassifyResult r = classify_batch(make_inputs(c, b, c.method, threads));

    ensure_dir(c.output_dir);
    write_text_file(join_path(c.output_dir, "scores.csv"), scores_csv(r.scores, b.action_vocab));
    write_text_file(join_path(c.output_dir, "predictions.csv"),
                    predictions_csv(r.predictions, b.action_vocab));

    json report;
    report["command"] = "classify";
    report["config"] = echo_config(c, "classify");
    report["method"] = method_name(c.method);
    report["videos"] = r.scores.video_ids.size();
    report["actions"] = r.scores.action_ids.size();
    report["degenerate_similarities"] = space_degenerate(b);
    write_json_file(join_path(c.output_dir, "report.json"), report);

    json summary;
    summary["command"] = "classify";
    summary["method"] = method_name(c.method);
    summary["videos"] = r.scores.video_ids.size();
    summary["actions"] = r.scores.action_ids.size();
    summary["output_dir"] = c.output_dir;
    return summary;
}

json cmd_evaluate(const RunConfig& c) {
    int threads = resolve_threads(c.threads);
    Bundle b;
    load_bundle(b, c, needs_for(c, "evaluate"), threads);
    ClassifyResult main = classify_batch(make_inputs(c, b, c.method, threads));
    double acc = accuracy(main.predictions, *b.truth);

    ensure_dir(c.output_dir);
    write_text_file(join_path(c.output_dir, "predictions.csv"),
                    predictions_csv(main.predictions, b.action_vocab));

    json report;
    report["command"] = "evaluate";
    report["config"] = echo_config(c, "evaluate");
    report["method"] = method_name(c.method);
    report["videos"] = main.scores.video_ids.size();
    report["actions"] = main.scores.action_ids.size();
    report["accuracy"] = acc;

    json summary;
    summary["command"] = "evaluate";
    summary["method"] = method_name(c.method);
    summary["videos"] = main.scores.video_ids.size();
    summary["accuracy"] = acc;

    if (c.baseline_method) {
        ClassifyResult base = classify_batch(make_inputs(c, b, *c.baseline_method, threads));
        double base_acc = accuracy(base.predictions, *b.truth);
        auto deltas = per_action_delta(main.predictions, base.predictions, *b.truth);
        write_text_file(join_path(c.output_dir, "per_action_delta.csv"),
                        delta_csv(deltas, b.action_vocab));
        json baseline;
        baseline["method"] = method_name(*c.baseline_method);
        baseline["accuracy"] = base_acc;
        report["baseline"] = std::move(baseline);
        summary["baseline_accuracy"] = base_acc;
    }

    if (c.subset_size) {
        TrialReport tr = run_subset_trials(main.scores, *b.truth,
                                           static_cast<uint32_t>(b.action_vocab.size()),
                                           *c.subset_size, c.num_trials, c.seed, threads);
        write_text_file(join_path(c.output_dir, "trials.csv"), trials_csv(tr));
        report["trials"] = trial_report_json(tr);
        summary["trial_mean_accuracy"] = tr.mean;
        summary["trial_std_accuracy"] = tr.stddev;
    }

    report["degenerate_similarities"] = space_degenerate(b);
    write_json_file(join_path(c.output_dir, "evaluation.json"), report);
    summary["output_dir"] = c.output_dir;
    return summary;
}

json cmd_ablate(const RunConfig& c) {
    int threads = resolve_threads(c.threads);
    Bundle b;
    load_bundle(b, c, needs_for(c, "ablate"), threads);

    std::vector<Method> methods = c.ablate_methods;
    if (methods.empty())
        methods = {Method::object_only, Method::scene_only, Method::concatenation,
                   Method::late_fusion, Method::compositions};
    std::vector<uint32_t> sizes = c.subset_sizes;
    if (sizes.empty() && c.subset_size) sizes.push_back(*c.subset_size);

    std::string csv = "method,accuracy";
    for (uint32_t s : sizes) {
        csv += ",acc" + std::to_string(s) + "_mean";
        csv += ",acc" + std::to_string(s) + "_std";
    }
    csv += '\n';

    json method_rows = json::array();
    for (Method m : methods) {
        ClassifyResult r = classify_batch(make_inputs(c, b, m, threads));
        double acc = accuracy(r.predictions, *b.truth);
        csv += method_name(m);
        csv += ',';
        csv += format_real(acc);
        json jm;
        jm["method"] = method_name(m);
        jm["accuracy"] = acc;
        json trials = json::array();
        for (uint32_t s : sizes) {
            TrialReport tr = run_subset_trials(r.scores, *b.truth,
                                               static_cast<uint32_t>(b.action_vocab.size()), s,
                                               c.num_trials, c.seed, threads);
            csv += ',';
            csv += format_real(tr.mean);
            csv += ',';
            csv += format_real(tr.stddev);
            trials.push_back(trial_report_json(tr));
        }
        csv += '\n';
        if (!sizes.empty()) jm["subset_trials"] = std::move(trials);
        method_rows.push_back(std::move(jm));
    }

    ensure_dir(c.output_dir);
    write_text_file(join_path(c.output_dir, "ablation.csv"), csv);
    json report;
    report["command"] = "ablate";
    report["config"] = echo_config(c, "ablate");
    report["methods"] = std::move(method_rows);
    report["degenerate_similarities"] = space_degenerate(b);
    write_json_file(join_path(c.output_dir, "report.json"), report);

    json summary;
    summary["command"] = "ablate";
    summary["methods"] = methods.size();
    summary["subset_sizes"] = sizes;
    summary["output_dir"] = c.output_dir;
    return summary;
}

json cmd_fixtures(const RunConfig& c) {
    FixtureSpec spec;
    spec.objects = c.fixture.objects;
    spec.scenes = c.fixture.scenes;
    spec.actions = c.fixture.actions;
    spec.videos = c.fixture.videos;
    spec.dim = c.fixture.dim;
    spec.seed = c.seed;
    spec.max_attempts = c.fixture.max_attempts;
    spec.verify = c.fixture.verify;
    Fixture fx = generate_fixture(spec);

    ensure_dir(c.output_dir);
    bool binary_emb = c.embeddings_format == "binary_table";
    bool binary_probs = c.probabilities_format == "zspm_binary";
    std::string emb_ext = binary_emb ? ".zseb" : ".vec";
    std::string prob_ext = binary_probs ? ".zspm" : ".csv";

    std::vector<std::string> files;
    auto emit_vocab = [&](const Vocabulary& v, const std::string& name) {
        v.save(join_path(c.output_dir, name));
        files.push_back(name);
    };
    auto emit_table = [&](const EmbeddingTable& t, const Vocabulary& v, const std::string& stem) {
        std::string name = stem + emb_ext;
        std::string path = join_path(c.output_dir, name);
        if (binary_emb)
            t.save_binary(path, v);
        else
            save_word2vec_text(t, v, path);
        files.push_back(name);
    };
    emit_vocab(fx.objects, "objects.txt");
    emit_vocab(fx.scenes, "scenes.txt");
    emit_vocab(fx.actions, "actions.txt");
    emit_table(fx.object_table(), fx.objects, "objects");
    emit_table(fx.scene_table(), fx.scenes, "scenes");
    emit_table(fx.action_table(), fx.actions, "actions");

    bool have_videos = spec.videos > 0;
    if (have_videos) {
        auto emit_probs = [&](const ProbabilityMatrix& m, const Vocabulary& v,
                              const std::string& stem) {
            std::string name = stem + prob_ext;
            std::string path = join_path(c.output_dir, name);
            if (binary_probs)
                m.save_binary(path);
            else
                m.save_csv(path, v);
            files.push_back(name);
        };
        emit_probs(fx.object_matrix(), fx.objects, "object_probabilities");
        emit_probs(fx.scene_matrix(), fx.scenes, "scene_probabilities");
        fx.ground_truth().save(join_path(c.output_dir, "ground_truth.csv"), fx.actions);
        files.push_back("ground_truth.csv");
    }

    json cfg;
    cfg["objects_vocab"] = "objects.txt";
    cfg["scenes_vocab"] = "scenes.txt";
    cfg["actions_vocab"] = "actions.txt";
    cfg["objects_embeddings"] = "objects" + emb_ext;
    cfg["scenes_embeddings"] = "scenes" + emb_ext;
    cfg["actions_embeddings"] = "actions" + emb_ext;
    cfg["embeddings_format"] = binary_emb ? "binary_table" : "word2vec_text";
    if (have_videos) {
        cfg["objects_probabilities"] = "object_probabilities" + prob_ext;
        cfg["scenes_probabilities"] = "scene_probabilities" + prob_ext;
        cfg["probabilities_format"] = binary_probs ? "zspm_binary" : "csv";
        cfg["ground_truth"] = "ground_truth.csv";
    }
    cfg["method"] = method_name(Method::compositions);
    cfg["k_objects"] = fx.k_objects;
    cfg["k_scenes"] = fx.k_scenes;
    cfg["k_concatenation"] = fx.k_concatenation;
    cfg["k_compositions"] = fx.k_compositions;
    cfg["lambda"] = 0.75;
    cfg["diversify"] = true;
    size_t comp_count = static_cast<size_t>(spec.objects) * spec.scenes;
    cfg["pool_size"] = comp_count <= oracle::kMaxCompositions ? "full" : "default";
    cfg["oov_policy"] = "fail";
    cfg["seed"] = c.seed;
    write_json_file(join_path(c.output_dir, "config.json"), cfg);
    files.push_back("config.json");

    json manifest;
    manifest["command"] = "fixtures";
    manifest["config"] = echo_config(c, "fixtures");
    manifest["seed"] = c.seed;
    manifest["attempts_used"] = fx.attempts_used;
    manifest["verified"] = fx.verified;
    json counts;
    counts["objects"] = spec.objects;
    counts["scenes"] = spec.scenes;
    counts["actions"] = spec.actions;
    counts["videos"] = spec.videos;
    counts["dim"] = spec.dim;
    manifest["counts"] = std::move(counts);
    manifest["files"] = files;
    write_json_file(join_path(c.output_dir, "manifest.json"), manifest);

    json summary;
    summary["command"] = "fixtures";
    summary["attempts_used"] = fx.attempts_used;
    summary["verified"] = fx.verified;
    summary["files"] = files.size() + 1;
    summary["output_dir"] = c.output_dir;
    return summary;
}

json cmd_oracle_check(const RunConfig& c) {
    int threads = resolve_threads(c.threads);
    if (method_is_compositional(c.method)) {
        Vocabulary ov = Vocabulary::load(c.objects_vocab, SourceKind::objects);
        Vocabulary sv = Vocabulary::load(c.scenes_vocab, SourceKind::scenes);
        size_t count = ov.size() * sv.size();
        if (count > oracle::kMaxCompositions)
            raise(ErrorKind::size_guard,
                  "oracle-check materializes every composition; " + std::to_string(count) +
                      " exceeds the limit of " + std::to_string(oracle::kMaxCompositions));
    }
    Bundle b;
    load_bundle(b, c, needs_for(c, "classify"), threads);
    ClassifyResult engine = classify_batch(make_inputs(c, b, c.method, threads));

    oracle::Config oc;
    oc.method = c.method;
    oc.k = c.k_compositions;
    oc.lambda = c.lambda;
    oc.diversify = c.diversify;
    oc.pool_size = c.pool_value();
    oc.k_objects = c.k_objects;
    oc.k_scenes = c.k_scenes;
    oc.k_concatenation = c.k_concatenation;
    oc.clip_similarities = c.clip_similarities;
    oc.normalize_before_sum = c.normalize_before_sum;
    oc.exclude_self_pairs = c.exclude_self_pairs;
    const EmbeddingTable empty_table;
    oracle::Result ref = oracle::pipeline(b.objects ? *b.objects : empty_table,
                                          b.scenes ? *b.scenes : empty_table, *b.actions,
                                          b.object_probs ? &*b.object_probs : nullptr,
                                          b.scene_probs ? &*b.scene_probs : nullptr, oc);

    bool ok = true;
    json checks = json::array();

    if (method_is_compositional(c.method)) {
        size_t mismatched = 0;
        std::string first;
        for (size_t a = 0; a < engine.sets.size(); ++a) {
            std::vector<CompositionRef> eng, orc;
            eng.reserve(engine.sets[a].members.size());
            for (const auto& m : engine.sets[a].members) eng.push_back(m.ref);
            orc.reserve(ref.sets[a].size());
            for (const auto& m : ref.sets[a]) orc.push_back(m.ref);
            std::sort(eng.begin(), eng.end());
            std::sort(orc.begin(), orc.end());
            if (eng != orc) {
                ++mismatched;
                if (first.empty()) first = b.action_vocab.label(static_cast<uint32_t>(a));
            }
        }
        json chk;
        chk["name"] = "selection_sets";
        chk["pass"] = mismatched == 0;
        chk["mismatched_actions"] = mismatched;
        if (!first.empty()) chk["first_mismatch"] = first;
        checks.push_back(std::move(chk));
        ok &= mismatched == 0;
    }

    {
        bool size_ok = engine.scores.scores.size() == ref.scores.size();
        double max_rel = 0.0;
        if (size_ok) {
            for (size_t i = 0; i < ref.scores.size(); ++i) {
                double e = engine.scores.scores[i];
                double o = ref.scores[i];
                double scale = std::max(1.0, std::max(std::abs(e), std::abs(o)));
                max_rel = std::max(max_rel, std::abs(e - o) / scale);
            }
        }
        bool pass = size_ok && max_rel <= 1e-5;
        json chk;
        chk["name"] = "scores";
        chk["pass"] = pass;
        chk["max_rel_diff"] = max_rel;
        chk["cells"] = ref.scores.size();
        checks.push_back(std::move(chk));
        ok &= pass;
    }

    {
        size_t wrong = 0;
        std::string first;
        bool size_ok = engine.predictions.size() == ref.predictions.size();
        if (size_ok) {
            for (size_t v = 0; v < ref.predictions.size(); ++v) {
                if (engine.predictions[v].action_id != ref.predictions[v]) {
                    ++wrong;
                    if (first.empty()) first = engine.predictions[v].video_id;
                }
            }
        }
        bool pass = size_ok && wrong == 0;
        json chk;
        chk["name"] = "predictions";
        chk["pass"] = pass;
        chk["mismatched_videos"] = wrong;
        if (!first.empty()) chk["first_mismatch"] = first;
        checks.push_back(std::move(chk));
        ok &= pass;
    }

    json report;
    report["command"] = "oracle-check";
    report["config"] = echo_config(c, "oracle-check");
    report["method"] = method_name(c.method);
    report["checks"] = std::move(checks);
    report["pass"] = ok;
    ensure_dir(c.output_dir);
    write_json_file(join_path(c.output_dir, "oracle_check.json"), report);

    if (!ok)
        raise(ErrorKind::data, "oracle check failed for method '" +
                                   std::string(method_name(c.method)) +
                                   "', see oracle_check.json");

    json summary;
    summary["command"] = "oracle-check";
    summary["method"] = method_name(c.method);
    summary["pass"] = true;
    summary["videos"] = engine.scores.video_ids.size();
    summary["output_dir"] = c.output_dir;
    return summary;
}

} // namespace

json run_command(const std::string& command, const json& config_json,
                 const std::string& base_dir) {
    RunConfig c = parse_config(config_json, base_dir);
    validate_config(c, command);
    if (command == "select") return cmd_select(c);
    if (command == "classify") return cmd_classify(c);
    if (command == "evaluate") return cmd_evaluate(c);
    if (command == "ablate") return cmd_ablate(c);
    if (command == "fixtures") return cmd_fixtures(c);
    if (command == "oracle-check") return cmd_oracle_check(c);
    raise(ErrorKind::argument, "unknown command '" + command + "'");
}

} // namespace zscomp
