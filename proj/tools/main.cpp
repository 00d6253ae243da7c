#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zscomp/zscomp.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Command-line path overrides resolve against the caller's cwd; paths from
// the config file resolve against the file's directory inside the library.
std::string absolutize(const std::string& path) {
    std::error_code ec;
    fs::path abs = fs::absolute(path, ec);
    if (ec) return path;
    return abs.lexically_normal().string();
}

struct CommandState {
    std::string config_path;
    json overrides = json::object();
    json fixture = json::object();
};

void add_path_option(CLI::App* cmd, CommandState& st, const std::string& flag,
                     const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&st, key](const std::string& v) { st.overrides[key] = absolutize(v); }, help);
}

void add_string_option(CLI::App* cmd, CommandState& st, const std::string& flag,
                       const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&st, key](const std::string& v) { st.overrides[key] = v; }, help);
}

void add_uint_option(CLI::App* cmd, CommandState& st, const std::string& flag,
                     const std::string& key, const std::string& help) {
    cmd->add_option_function<uint64_t>(
        flag, [&st, key](uint64_t v) { st.overrides[key] = v; }, help);
}

void add_bool_option(CLI::App* cmd, CommandState& st, const std::string& flag,
                     const std::string& no_flag, const std::string& key,
                     const std::string& help) {
    cmd->add_flag_callback(
        flag, [&st, key]() { st.overrides[key] = true; }, help);
    cmd->add_flag_callback(
        no_flag, [&st, key]() { st.overrides[key] = false; }, "Disable " + key);
}

void add_common_options(CLI::App* cmd, CommandState& st) {
    cmd->add_option("--config", st.config_path, "JSON config file; flags override its fields")
        ->check(CLI::ExistingFile);

    add_path_option(cmd, st, "--objects-vocab", "objects_vocab", "Object label list");
    add_path_option(cmd, st, "--scenes-vocab", "scenes_vocab", "Scene label list");
    add_path_option(cmd, st, "--actions-vocab", "actions_vocab", "Action label list");
    add_path_option(cmd, st, "--objects-embeddings", "objects_embeddings",
                    "Object embedding file");
    add_path_option(cmd, st, "--scenes-embeddings", "scenes_embeddings", "Scene embedding file");
    add_path_option(cmd, st, "--actions-embeddings", "actions_embeddings",
                    "Action embedding file");
    add_path_option(cmd, st, "--objects-probabilities", "objects_probabilities",
                    "Object probability matrix");
    add_path_option(cmd, st, "--scenes-probabilities", "scenes_probabilities",
                    "Scene probability matrix");
    add_path_option(cmd, st, "--ground-truth", "ground_truth", "Ground truth CSV");
    add_path_option(cmd, st, "--cache-file", "cache_file",
                    "Pair cache; loaded when present, else built and saved");
    add_path_option(cmd, st, "--output-dir", "output_dir", "Directory for result files");

    add_string_option(cmd, st, "--embeddings-format", "embeddings_format",
                      "auto | word2vec_text | binary_table");
    add_string_option(cmd, st, "--probabilities-format", "probabilities_format",
                      "auto | csv | zspm_binary");
    add_string_option(cmd, st, "--method", "method",
                      "compositions | compositions_weighted_scoring | "
                      "compositions_weighted_selection | object_only | scene_only | "
                      "concatenation | late_fusion");
    add_uint_option(cmd, st, "--k-objects", "k_objects", "Objects per action (default 100)");
    add_uint_option(cmd, st, "--k-scenes", "k_scenes", "Scenes per action (default 5)");
    add_uint_option(cmd, st, "--k-concatenation", "k_concatenation",
                    "Union labels per action (default 100)");
    add_uint_option(cmd, st, "--k-compositions", "k_compositions",
                    "Compositions per action (default 250)");
    cmd->add_option_function<double>(
        "--lambda", [&st](double v) { st.overrides["lambda"] = v; },
        "MMR relevance-diversity trade-off in [0,1] (default 0.75)");
    add_bool_option(cmd, st, "--diversify", "--no-diversify", "diversify",
                    "Use MMR selection (default on)");
    add_string_option(cmd, st, "--pool-size", "pool_size",
                      "MMR candidate pool: default | full | positive integer");
    add_string_option(cmd, st, "--oov-policy", "oov_policy", "fail | zero");
    add_bool_option(cmd, st, "--renormalize", "--no-renormalize", "renormalize",
                    "Rescale probability rows that do not sum to 1");
    add_bool_option(cmd, st, "--normalize-before-sum", "--no-normalize-before-sum",
                    "normalize_before_sum", "Unit-normalize object/scene vectors before Eq. 1");
    add_bool_option(cmd, st, "--exclude-self-pairs", "--no-exclude-self-pairs",
                    "exclude_self_pairs", "Drop compositions with object_id == scene_id");
    add_bool_option(cmd, st, "--clip-similarities", "--no-clip-similarities",
                    "clip_similarities", "Clip negative similarities to 0 when scoring");
    add_uint_option(cmd, st, "--subset-size", "subset_size",
                    "Random action subset size for trial evaluation");
    add_uint_option(cmd, st, "--num-trials", "num_trials", "Trials per subset size (default 10)");
    cmd->add_option_function<std::vector<uint64_t>>(
           "--subset-sizes",
           [&st](const std::vector<uint64_t>& v) { st.overrides["subset_sizes"] = v; },
           "Subset sizes for ablate trials")
        ->delimiter(',');
    add_string_option(cmd, st, "--baseline-method", "baseline_method",
                      "Second method for the per-action delta table");
    cmd->add_option_function<std::vector<std::string>>(
           "--ablate-methods",
           [&st](const std::vector<std::string>& v) { st.overrides["ablate_methods"] = v; },
           "Methods for the ablate table (default: the five-method matrix)")
        ->delimiter(',');
    add_uint_option(cmd, st, "--seed", "seed", "Root seed for all randomness (default 0)");
    cmd->add_option_function<int>(
        "--threads", [&st](int v) { st.overrides["threads"] = v; },
        "Worker threads, 0 = auto (env ZSCOMP_THREADS as fallback)");
}

void add_fixture_options(CLI::App* cmd, CommandState& st) {
    auto set = [&st](const std::string& key) {
        return [&st, key](uint64_t v) { st.fixture[key] = v; };
    };
    cmd->add_option_function<uint64_t>("--objects", set("objects"), "Object count (default 20)");
    cmd->add_option_function<uint64_t>("--scenes", set("scenes"), "Scene count (default 15)");
    cmd->add_option_function<uint64_t>("--actions", set("actions"), "Action count (default 10)");
    cmd->add_option_function<uint64_t>("--videos", set("videos"),
                                       "Video count, 0 = embeddings only (default 50)");
    cmd->add_option_function<uint64_t>("--dim", set("dim"), "Embedding dimension (default 16)");
    cmd->add_option_function<uint64_t>("--max-attempts", set("max_attempts"),
                                       "Resampling budget for the planted check (default 50)");
    cmd->add_flag_callback(
        "--verify", [&st]() { st.fixture["verify"] = true; },
        "Require compositions to beat both baselines (default on)");
    cmd->add_flag_callback(
        "--no-verify", [&st]() { st.fixture["verify"] = false; },
        "Skip the planted-structure check");
}

int env_threads() {
    const char* env = std::getenv("ZSCOMP_THREADS");
    if (!env || !*env) return 0;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0 || v > 4096) return 0;
    return static_cast<int>(v);
}

int run(const std::string& command, CommandState& st) {
    json cfg = json::object();
    std::string base_dir = absolutize(".");
    if (!st.config_path.empty()) {
        std::ifstream in(st.config_path);
        if (!in) {
            std::fprintf(stderr, "error (io): cannot open config '%s'\n",
                         st.config_path.c_str());
            return 1;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        try {
            cfg = json::parse(buf.str());
        } catch (const json::parse_error& e) {
            std::fprintf(stderr, "error (config): %s is not valid JSON: %s\n",
                         st.config_path.c_str(), e.what());
            return 2;
        }
        if (!cfg.is_object()) {
            std::fprintf(stderr, "error (config): %s must hold a JSON object\n",
                         st.config_path.c_str());
            return 2;
        }
        base_dir = absolutize(fs::path(st.config_path).parent_path().string());
    }
    if (!st.fixture.empty()) {
        json& f = cfg["fixture"];
        if (!f.is_object()) f = json::object();
        for (auto& [key, value] : st.fixture.items()) f[key] = value;
    }
    for (auto& [key, value] : st.overrides.items()) cfg[key] = value;
    if (!cfg.contains("threads")) {
        int t = env_threads();
        if (t > 0) cfg["threads"] = t;
    }

    char* summary = nullptr;
    zsc_status status = zsc_run(command.c_str(), cfg.dump().c_str(), base_dir.c_str(), &summary);
    if (status != ZSC_OK) {
        std::fprintf(stderr, "error (%s): %s\n", zsc_status_name(status), zsc_last_error());
        return status == ZSC_ERR_CONFIG || status == ZSC_ERR_ARGUMENT ? 2 : 1;
    }
    if (summary) {
        std::printf("%s\n", summary);
        zsc_string_free(summary);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero-shot action classification from object-scene compositions"};
    app.set_version_flag("--version", zsc_version());
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {"select", "Export the top-k composition set per action"},
        {"classify", "Score videos against actions and write predictions"},
        {"evaluate", "Classify plus accuracy, subset trials and baseline deltas"},
        {"ablate", "Run the method matrix and emit one accuracy table"},
        {"fixtures", "Generate a synthetic planted-structure dataset"},
        {"oracle-check", "Compare the engine against the naive reference"},
    };

    std::vector<CommandState> states(std::size(subs));
    std::string chosen;
    for (size_t i = 0; i < std::size(subs); ++i) {
        CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
        add_common_options(cmd, states[i]);
        if (std::string(subs[i].name) == "fixtures") add_fixture_options(cmd, states[i]);
        cmd->callback([&chosen, name = std::string(subs[i].name)]() { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    for (size_t i = 0; i < std::size(subs); ++i)
        if (chosen == subs[i].name) return run(chosen, states[i]);
    return 2;
}
