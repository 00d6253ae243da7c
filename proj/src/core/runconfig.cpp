#include "core/runconfig.hpp"

#include <filesystem>
#include <unordered_set>

#include "core/error.hpp"
#include "core/text.hpp"

namespace zscomp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::unordered_set<std::string> kKnownKeys = {
    "objects_vocab", "scenes_vocab", "actions_vocab",
    "objects_embeddings", "scenes_embeddings", "actions_embeddings",
    "objects_probabilities", "scenes_probabilities",
    "ground_truth", "cache_file", "output_dir",
    "embeddings_format", "probabilities_format",
    "method", "k_objects", "k_scenes", "k_concatenation", "k_compositions",
    "lambda", "diversify", "pool_size", "oov_policy",
    "renormalize", "normalize_before_sum", "exclude_self_pairs", "clip_similarities",
    "subset_size", "num_trials", "subset_sizes", "baseline_method", "ablate_methods",
    "seed", "threads", "fixture",
};

const std::unordered_set<std::string> kFixtureKeys = {
    "objects", "scenes", "actions", "videos", "dim", "max_attempts", "verify",
};

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    raise(ErrorKind::config, "config field '" + field + "': " + why);
}

std::string get_string(const json& j, const std::string& key, std::string fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_string()) bad(key, "expected a string");
    return it->get<std::string>();
}

bool get_bool(const json& j, const std::string& key, bool fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_boolean()) bad(key, "expected a boolean");
    return it->get<bool>();
}

// JSON carries no signedness: a non-negative value may arrive as either an
// unsigned or a signed integer depending on how the document was built.
bool uint_value(const json& v, uint64_t& out) {
    if (v.is_number_unsigned()) {
        out = v.get<uint64_t>();
        return true;
    }
    if (v.is_number_integer()) {
        int64_t s = v.get<int64_t>();
        if (s < 0) return false;
        out = static_cast<uint64_t>(s);
        return true;
    }
    return false;
}

uint64_t get_uint(const json& j, const std::string& key, uint64_t fallback,
                  uint64_t min = 0, uint64_t max = UINT64_MAX) {
    auto it = j.find(key);
    uint64_t v = fallback;
    if (it != j.end()) {
        if (!uint_value(*it, v))
            bad(key, "expected a non-negative integer");
    }
    if (v < min || v > max)
        bad(key, "value " + std::to_string(v) + " out of range [" + std::to_string(min) + ", " +
                     std::to_string(max) + "]");
    return v;
}

double get_real(const json& j, const std::string& key, double fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) bad(key, "expected a number");
    return it->get<double>();
}

std::string resolve(const std::string& path, const std::string& base_dir) {
    if (path.empty() || base_dir.empty()) return path;
    fs::path p(path);
    if (p.is_absolute()) return path;
    return (fs::path(base_dir) / p).lexically_normal().string();
}

Method parse_method_or_die(const std::string& field, const std::string& name) {
    auto m = parse_method(name);
    if (!m)
        bad(field, "unknown method '" + name +
                       "' (expected compositions, compositions_weighted_scoring, "
                       "compositions_weighted_selection, object_only, scene_only, "
                       "concatenation or late_fusion)");
    return *m;
}

void require_path(const std::string& field, const std::string& value, bool must_exist) {
    if (value.empty()) bad(field, "required for this command");
    if (must_exist && !fs::exists(value)) bad(field, "path does not exist: " + value);
}

} // namespace

int64_t RunConfig::pool_value() const {
    if (pool_size == "default") return 0;
    if (pool_size == "full") return -1;
    uint64_t v;
    if (!parse_uint(pool_size, v) || v == 0)
        raise(ErrorKind::config,
              "config field 'pool_size': expected 'default', 'full' or a positive integer, got '" +
                  pool_size + "'");
    return static_cast<int64_t>(v);
}

OovPolicy RunConfig::oov() const {
    if (oov_policy == "fail") return OovPolicy::fail;
    if (oov_policy == "zero") return OovPolicy::zero;
    raise(ErrorKind::config,
          "config field 'oov_policy': expected 'fail' or 'zero', got '" + oov_policy + "'");
}

EmbeddingFormat RunConfig::embedding_format_for(const std::string& path) const {
    if (embeddings_format == "word2vec_text") return EmbeddingFormat::word2vec_text;
    if (embeddings_format == "binary_table") return EmbeddingFormat::binary_table;
    if (embeddings_format == "auto")
        return path.ends_with(".zseb") ? EmbeddingFormat::binary_table
                                       : EmbeddingFormat::word2vec_text;
    raise(ErrorKind::config, "config field 'embeddings_format': expected 'auto', "
                             "'word2vec_text' or 'binary_table', got '" +
                                 embeddings_format + "'");
}

ProbabilityFormat RunConfig::probability_format_for(const std::string& path) const {
    if (probabilities_format == "csv") return ProbabilityFormat::csv;
    if (probabilities_format == "zspm_binary") return ProbabilityFormat::zspm_binary;
    if (probabilities_format == "auto")
        return path.ends_with(".zspm") ? ProbabilityFormat::zspm_binary : ProbabilityFormat::csv;
    raise(ErrorKind::config, "config field 'probabilities_format': expected 'auto', 'csv' or "
                             "'zspm_binary', got '" +
                                 probabilities_format + "'");
}

RunConfig parse_config(const json& j, const std::string& base_dir) {
    if (!j.is_object()) raise(ErrorKind::config, "config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!kKnownKeys.count(key)) raise(ErrorKind::config, "unknown config key '" + key + "'");
    }

    RunConfig c;
    c.objects_vocab = resolve(get_string(j, "objects_vocab", ""), base_dir);
    c.scenes_vocab = resolve(get_string(j, "scenes_vocab", ""), base_dir);
    c.actions_vocab = resolve(get_string(j, "actions_vocab", ""), base_dir);
    c.objects_embeddings = resolve(get_string(j, "objects_embeddings", ""), base_dir);
    c.scenes_embeddings = resolve(get_string(j, "scenes_embeddings", ""), base_dir);
    c.actions_embeddings = resolve(get_string(j, "actions_embeddings", ""), base_dir);
    c.objects_probabilities = resolve(get_string(j, "objects_probabilities", ""), base_dir);
    c.scenes_probabilities = resolve(get_string(j, "scenes_probabilities", ""), base_dir);
    c.ground_truth = resolve(get_string(j, "ground_truth", ""), base_dir);
    c.cache_file = resolve(get_string(j, "cache_file", ""), base_dir);
    c.output_dir = resolve(get_string(j, "output_dir", ""), base_dir);

    c.embeddings_format = get_string(j, "embeddings_format", c.embeddings_format);
    c.probabilities_format = get_string(j, "probabilities_format", c.probabilities_format);
    c.method = parse_method_or_die("method", get_string(j, "method", "compositions"));
    c.k_objects = static_cast<uint32_t>(get_uint(j, "k_objects", 100, 1, 1u << 30));
    c.k_scenes = static_cast<uint32_t>(get_uint(j, "k_scenes", 5, 1, 1u << 30));
    c.k_concatenation = static_cast<uint32_t>(get_uint(j, "k_concatenation", 100, 1, 1u << 30));
    c.k_compositions = static_cast<uint32_t>(get_uint(j, "k_compositions", 250, 1, 1u << 30));
    c.lambda = get_real(j, "lambda", 0.75);
    if (!(c.lambda >= 0.0 && c.lambda <= 1.0))
        bad("lambda", "must be in [0, 1], got " + format_real(c.lambda));
    c.diversify = get_bool(j, "diversify", true);
    if (auto it = j.find("pool_size"); it != j.end()) {
        if (uint64_t v; uint_value(*it, v)) {
            c.pool_size = std::to_string(v);
        } else if (it->is_string()) {
            c.pool_size = it->get<std::string>();
        } else {
            bad("pool_size", "expected 'default', 'full' or a positive integer");
        }
    }
    (void)c.pool_value(); // range check now, not at selection time
    c.oov_policy = get_string(j, "oov_policy", c.oov_policy);
    (void)c.oov();
    c.renormalize = get_bool(j, "renormalize", false);
    c.normalize_before_sum = get_bool(j, "normalize_before_sum", false);
    c.exclude_self_pairs = get_bool(j, "exclude_self_pairs", false);
    c.clip_similarities = get_bool(j, "clip_similarities", false);

    if (auto it = j.find("subset_size"); it != j.end()) {
        uint64_t v;
        if (!uint_value(*it, v) || v == 0) bad("subset_size", "expected a positive integer");
        c.subset_size = static_cast<uint32_t>(v);
    }
    c.num_trials = static_cast<uint32_t>(get_uint(j, "num_trials", 10, 1, 1u << 20));
    if (auto it = j.find("subset_sizes"); it != j.end()) {
        if (!it->is_array()) bad("subset_sizes", "expected an array of positive integers");
        for (const auto& e : *it) {
            uint64_t v;
            if (!uint_value(e, v) || v == 0)
                bad("subset_sizes", "expected an array of positive integers");
            c.subset_sizes.push_back(static_cast<uint32_t>(v));
        }
    }
    if (auto it = j.find("baseline_method"); it != j.end()) {
        if (!it->is_string()) bad("baseline_method", "expected a method name");
        c.baseline_method = parse_method_or_die("baseline_method", it->get<std::string>());
    }
    if (auto it = j.find("ablate_methods"); it != j.end()) {
        if (!it->is_array()) bad("ablate_methods", "expected an array of method names");
        for (const auto& e : *it) {
            if (!e.is_string()) bad("ablate_methods", "expected an array of method names");
            c.ablate_methods.push_back(
                parse_method_or_die("ablate_methods", e.get<std::string>()));
        }
    }

    if (auto it = j.find("seed"); it != j.end()) {
        if (!uint_value(*it, c.seed)) bad("seed", "expected a non-negative integer");
    }
    if (auto it = j.find("threads"); it != j.end()) {
        uint64_t v;
        if (!uint_value(*it, v) || v > 4096) bad("threads", "expected an integer in [0, 4096]");
        c.threads = static_cast<int>(v);
    }

    if (auto it = j.find("fixture"); it != j.end()) {
        if (!it->is_object()) bad("fixture", "expected an object");
        for (const auto& [key, value] : it->items()) {
            (void)value;
            if (!kFixtureKeys.count(key))
                raise(ErrorKind::config, "unknown config key 'fixture." + key + "'");
        }
        const json& f = *it;
        c.fixture.objects = static_cast<uint32_t>(get_uint(f, "objects", 20, 1, 1u << 24));
        c.fixture.scenes = static_cast<uint32_t>(get_uint(f, "scenes", 15, 1, 1u << 24));
        c.fixture.actions = static_cast<uint32_t>(get_uint(f, "actions", 10, 1, 1u << 24));
        c.fixture.videos = static_cast<uint32_t>(get_uint(f, "videos", 50, 0, 1u << 24));
        c.fixture.dim = static_cast<uint32_t>(get_uint(f, "dim", 16, 1, 1u << 16));
        c.fixture.max_attempts =
            static_cast<uint32_t>(get_uint(f, "max_attempts", 50, 1, 100000));
        c.fixture.verify = get_bool(f, "verify", true);
    }
    return c;
}

void validate_config(const RunConfig& c, const std::string& command) {
    auto need_actions = [&] {
        require_path("actions_vocab", c.actions_vocab, true);
        require_path("actions_embeddings", c.actions_embeddings, true);
    };
    auto need_objects = [&](bool probs) {
        require_path("objects_vocab", c.objects_vocab, true);
        require_path("objects_embeddings", c.objects_embeddings, true);
        if (probs) require_path("objects_probabilities", c.objects_probabilities, true);
    };
    auto need_scenes = [&](bool probs) {
        require_path("scenes_vocab", c.scenes_vocab, true);
        require_path("scenes_embeddings", c.scenes_embeddings, true);
        if (probs) require_path("scenes_probabilities", c.scenes_probabilities, true);
    };
    auto need_output = [&] { require_path("output_dir", c.output_dir, false); };

    if (command == "select") {
        if (!method_is_compositional(c.method))
            raise(ErrorKind::config,
                  "config field 'method': select requires a compositions method, got '" +
                      std::string(method_name(c.method)) + "'");
        need_actions();
        need_objects(false);
        need_scenes(false);
        need_output();
        int64_t pool = c.pool_value();
        if (pool > 0 && pool < int64_t(c.k_compositions))
            raise(ErrorKind::config, "config field 'pool_size': " + std::to_string(pool) +
                                         " is smaller than k_compositions = " +
                                         std::to_string(c.k_compositions));
    } else if (command == "classify" || command == "evaluate" || command == "oracle-check") {
        need_actions();
        if (method_uses_objects(c.method)) need_objects(true);
        if (method_uses_scenes(c.method)) need_scenes(true);
        need_output();
        if (command == "evaluate") require_path("ground_truth", c.ground_truth, true);
        int64_t pool = c.pool_value();
        if (method_is_compositional(c.method) && pool > 0 &&
            pool < int64_t(c.k_compositions))
            raise(ErrorKind::config, "config field 'pool_size': " + std::to_string(pool) +
                                         " is smaller than k_compositions = " +
                                         std::to_string(c.k_compositions));
        if (command == "evaluate" && c.baseline_method && *c.baseline_method == c.method)
            raise(ErrorKind::config,
                  "config field 'baseline_method': must differ from 'method'");
    } else if (command == "ablate") {
        need_actions();
        need_objects(true);
        need_scenes(true);
        require_path("ground_truth", c.ground_truth, true);
        need_output();
    } else if (command == "fixtures") {
        need_output();
    } else {
        raise(ErrorKind::argument, "unknown command '" + command + "'");
    }
}

json echo_config(const RunConfig& c, const std::string& command) {
    json j;
    auto put_path = [&](const char* key, const std::string& value) {
        if (!value.empty()) j[key] = value;
    };
    put_path("objects_vocab", c.objects_vocab);
    put_path("scenes_vocab", c.scenes_vocab);
    put_path("actions_vocab", c.actions_vocab);
    put_path("objects_embeddings", c.objects_embeddings);
    put_path("scenes_embeddings", c.scenes_embeddings);
    put_path("actions_embeddings", c.actions_embeddings);
    put_path("objects_probabilities", c.objects_probabilities);
    put_path("scenes_probabilities", c.scenes_probabilities);
    put_path("ground_truth", c.ground_truth);
    put_path("cache_file", c.cache_file);
    j["embeddings_format"] = c.embeddings_format;
    j["probabilities_format"] = c.probabilities_format;
    j["method"] = method_name(c.method);
    j["k_objects"] = c.k_objects;
    j["k_scenes"] = c.k_scenes;
    j["k_concatenation"] = c.k_concatenation;
    j["k_compositions"] = c.k_compositions;
    j["lambda"] = c.lambda;
    j["diversify"] = c.diversify;
    j["pool_size"] = c.pool_size;
    j["oov_policy"] = c.oov_policy;
    j["renormalize"] = c.renormalize;
    j["normalize_before_sum"] = c.normalize_before_sum;
    j["exclude_self_pairs"] = c.exclude_self_pairs;
    j["clip_similarities"] = c.clip_similarities;
    j["seed"] = c.seed;
    if (c.subset_size) j["subset_size"] = *c.subset_size;
    j["num_trials"] = c.num_trials;
    if (!c.subset_sizes.empty()) j["subset_sizes"] = c.subset_sizes;
    if (c.baseline_method) j["baseline_method"] = method_name(*c.baseline_method);
    if (!c.ablate_methods.empty()) {
        json methods = json::array();
        for (Method m : c.ablate_methods) methods.push_back(method_name(m));
        j["ablate_methods"] = methods;
    }
    if (command == "fixtures") {
        j["fixture"] = {
            {"objects", c.fixture.objects},   {"scenes", c.fixture.scenes},
            {"actions", c.fixture.actions},   {"videos", c.fixture.videos},
            {"dim", c.fixture.dim},           {"max_attempts", c.fixture.max_attempts},
            {"verify", c.fixture.verify},
        };
    }
    return j;
}

} // namespace zscomp
