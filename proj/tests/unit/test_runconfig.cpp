#include <doctest.h>

#include <string>

#include <json.hpp>

#include "core/runconfig.hpp"

#include "helpers.hpp"

using namespace zscomp;
using nlohmann::json;
using testutil::TempDir;

TEST_CASE("defaults follow the documented values") {
    auto c = parse_config(json::object(), "/base");
    CHECK(c.method == Method::compositions);
    CHECK(c.k_objects == 100);
    CHECK(c.k_scenes == 5);
    CHECK(c.k_concatenation == 100);
    CHECK(c.k_compositions == 250);
    CHECK(c.lambda == 0.75);
    CHECK(c.diversify);
    CHECK(c.pool_size == "default");
    CHECK(c.oov_policy == "fail");
    CHECK_FALSE(c.renormalize);
    CHECK_FALSE(c.normalize_before_sum);
    CHECK_FALSE(c.exclude_self_pairs);
    CHECK_FALSE(c.clip_similarities);
    CHECK(c.num_trials == 10);
    CHECK(c.seed == 0);
    CHECK(c.threads == 0);
    CHECK_FALSE(c.subset_size.has_value());
    CHECK_FALSE(c.baseline_method.has_value());
    CHECK(c.embeddings_format == "auto");
    CHECK(c.probabilities_format == "auto");
}

TEST_CASE("unknown keys are rejected by name") {
    auto msg = testutil::raised_message(
        [&] { parse_config(json{{"bogus_key", 1}}, "/base"); });
    CHECK(msg.find("unknown config key 'bogus_key'") != std::string::npos);
    auto kind = testutil::raised_kind(
        [&] { parse_config(json{{"bogus_key", 1}}, "/base"); });
    CHECK(*kind == ErrorKind::config);
    SUBCASE("inside the fixture block too") {
        json j{{"fixture", json{{"widgets", 3}}}};
        auto m2 = testutil::raised_message([&] { parse_config(j, "/base"); });
        CHECK(m2.find("unknown config key 'fixture.widgets'") != std::string::npos);
    }
}

TEST_CASE("type errors name the field") {
    for (auto bad : {json{{"k_objects", "ten"}}, json{{"lambda", "x"}},
                     json{{"diversify", 3}}, json{{"seed", -1}},
                     json{{"method", 7}}, json{{"subset_sizes", "all"}}}) {
        auto kind = testutil::raised_kind([&] { parse_config(bad, "/base"); });
        REQUIRE(kind.has_value());
        CHECK(*kind == ErrorKind::config);
    }
    auto msg = testutil::raised_message(
        [&] { parse_config(json{{"k_objects", "ten"}}, "/base"); });
    CHECK(msg.find("k_objects") != std::string::npos);
}

TEST_CASE("lambda range is validated at parse time") {
    CHECK(parse_config(json{{"lambda", 0.0}}, "/b").lambda == 0.0);
    CHECK(parse_config(json{{"lambda", 1.0}}, "/b").lambda == 1.0);
    for (double bad : {-0.5, 1.0001}) {
        auto msg = testutil::raised_message(
            [&] { parse_config(json{{"lambda", bad}}, "/b"); });
        CHECK(msg.find("lambda") != std::string::npos);
    }
}

TEST_CASE("pool_size accepts default, full and positive integers") {
    CHECK(parse_config(json::object(), "/b").pool_value() == 0);
    CHECK(parse_config(json{{"pool_size", "full"}}, "/b").pool_value() == -1);
    CHECK(parse_config(json{{"pool_size", "1234"}}, "/b").pool_value() == 1234);
    CHECK(parse_config(json{{"pool_size", 800}}, "/b").pool_value() == 800);
    for (json bad : {json{{"pool_size", "zero"}}, json{{"pool_size", "0"}},
                     json{{"pool_size", -3}}, json{{"pool_size", true}}}) {
        auto kind = testutil::raised_kind([&] { parse_config(bad, "/b"); });
        REQUIRE(kind.has_value());
        CHECK(*kind == ErrorKind::config);
    }
}

TEST_CASE("methods parse by exact name") {
    CHECK(parse_config(json{{"method", "late_fusion"}}, "/b").method == Method::late_fusion);
    CHECK(parse_config(json{{"method", "compositions_weighted_selection"}}, "/b").method ==
          Method::compositions_weighted_selection);
    auto msg = testutil::raised_message(
        [&] { parse_config(json{{"method", "composition"}}, "/b"); });
    CHECK(msg.find("method") != std::string::npos);
    CHECK(msg.find("composition") != std::string::npos);
}

TEST_CASE("relative paths resolve against base_dir, absolute stay put") {
    json j{{"objects_vocab", "data/objects.txt"},
           {"actions_vocab", "/abs/actions.txt"}};
    auto c = parse_config(j, "/base/dir");
    CHECK(c.objects_vocab == "/base/dir/data/objects.txt");
    CHECK(c.actions_vocab == "/abs/actions.txt");
    CHECK(c.scenes_vocab.empty());
}

TEST_CASE("oov policy and formats are validated") {
    CHECK(parse_config(json{{"oov_policy", "zero"}}, "/b").oov() == OovPolicy::zero);
    auto kind = testutil::raised_kind(
        [&] { parse_config(json{{"oov_policy", "ignore"}}, "/b"); });
    REQUIRE(kind.has_value());
    CHECK(*kind == ErrorKind::config);

    auto c = parse_config(json::object(), "/b");
    CHECK(c.embedding_format_for("x.vec") == EmbeddingFormat::word2vec_text);
    CHECK(c.embedding_format_for("x.zseb") == EmbeddingFormat::binary_table);
    CHECK(c.probability_format_for("p.csv") == ProbabilityFormat::csv);
    CHECK(c.probability_format_for("p.zspm") == ProbabilityFormat::zspm_binary);
    auto forced = parse_config(json{{"embeddings_format", "word2vec_text"}}, "/b");
    CHECK(forced.embedding_format_for("x.zseb") == EmbeddingFormat::word2vec_text);
    auto msg = testutil::raised_message([&] {
        parse_config(json{{"embeddings_format", "wordvec"}}, "/b")
            .embedding_format_for("x.vec");
    });
    CHECK(msg.find("embeddings_format") != std::string::npos);
}

TEST_CASE("validate_config enforces per-command requirements") {
    TempDir tmp;
    testutil::write_file(tmp.file("v.txt"), "a\n");
    testutil::write_file(tmp.file("e.vec"), "a 1 0\n");
    testutil::write_file(tmp.file("p.csv"), "video_id,a\nv,1\n");
    testutil::write_file(tmp.file("gt.csv"), "video_id,action_label\nv,a\n");

    auto base = json{{"objects_vocab", "v.txt"},      {"scenes_vocab", "v.txt"},
                     {"actions_vocab", "v.txt"},      {"objects_embeddings", "e.vec"},
                     {"scenes_embeddings", "e.vec"},  {"actions_embeddings", "e.vec"},
                     {"objects_probabilities", "p.csv"},
                     {"scenes_probabilities", "p.csv"},
                     {"ground_truth", "gt.csv"},      {"output_dir", "out"}};

    SUBCASE("complete config passes every command") {
        auto c = parse_config(base, tmp.path);
        for (const char* cmd : {"select", "classify", "evaluate", "ablate", "fixtures"})
            CHECK_NOTHROW(validate_config(c, cmd));
    }
    SUBCASE("select rejects non-compositional methods") {
        auto j = base;
        j["method"] = "object_only";
        auto c = parse_config(j, tmp.path);
        auto msg = testutil::raised_message([&] { validate_config(c, "select"); });
        CHECK(msg.find("method") != std::string::npos);
        CHECK(msg.find("object_only") != std::string::npos);
    }
    SUBCASE("missing files are named") {
        auto j = base;
        j.erase("actions_embeddings");
        auto c = parse_config(j, tmp.path);
        auto msg = testutil::raised_message([&] { validate_config(c, "classify"); });
        CHECK(msg.find("actions_embeddings") != std::string::npos);
    }
    SUBCASE("nonexistent path is a config error naming the field") {
        auto j = base;
        j["objects_vocab"] = "missing.txt";
        auto c = parse_config(j, tmp.path);
        auto kind = testutil::raised_kind([&] { validate_config(c, "classify"); });
        REQUIRE(kind.has_value());
        CHECK(*kind == ErrorKind::config);
        auto msg = testutil::raised_message([&] { validate_config(c, "classify"); });
        CHECK(msg.find("objects_vocab") != std::string::npos);
    }
    SUBCASE("object_only classify does not need scene inputs") {
        json j{{"actions_vocab", "v.txt"},       {"actions_embeddings", "e.vec"},
               {"objects_vocab", "v.txt"},       {"objects_embeddings", "e.vec"},
               {"objects_probabilities", "p.csv"},
               {"method", "object_only"},        {"output_dir", "out"}};
        auto c = parse_config(j, tmp.path);
        CHECK_NOTHROW(validate_config(c, "classify"));
    }
    SUBCASE("evaluate needs ground truth") {
        auto j = base;
        j.erase("ground_truth");
        auto c = parse_config(j, tmp.path);
        auto msg = testutil::raised_message([&] { validate_config(c, "evaluate"); });
        CHECK(msg.find("ground_truth") != std::string::npos);
        CHECK_NOTHROW(validate_config(c, "classify"));
    }
    SUBCASE("evaluate rejects baseline equal to method") {
        auto j = base;
        j["method"] = "compositions";
        j["baseline_method"] = "compositions";
        auto c = parse_config(j, tmp.path);
        auto msg = testutil::raised_message([&] { validate_config(c, "evaluate"); });
        CHECK(msg.find("baseline_method") != std::string::npos);
    }
    SUBCASE("pool smaller than k_compositions is caught early") {
        auto j = base;
        j["pool_size"] = 10;
        j["k_compositions"] = 50;
        auto c = parse_config(j, tmp.path);
        auto msg = testutil::raised_message([&] { validate_config(c, "select"); });
        CHECK(msg.find("pool_size") != std::string::npos);
    }
    SUBCASE("unknown command is an argument error") {
        auto c = parse_config(base, tmp.path);
        auto kind = testutil::raised_kind([&] { validate_config(c, "transmogrify"); });
        REQUIRE(kind.has_value());
        CHECK(*kind == ErrorKind::argument);
    }
}

TEST_CASE("echo_config excludes threads and output_dir") {
    json j{{"threads", 8},
           {"output_dir", "somewhere"},
           {"seed", 42},
           {"method", "scene_only"},
           {"subset_size", 5},
           {"baseline_method", "object_only"}};
    auto c = parse_config(j, "/b");
    auto echo = echo_config(c, "evaluate");
    CHECK_FALSE(echo.contains("threads"));
    CHECK_FALSE(echo.contains("output_dir"));
    CHECK(echo["seed"] == 42);
    CHECK(echo["method"] == "scene_only");
    CHECK(echo["subset_size"] == 5);
    CHECK(echo["baseline_method"] == "object_only");
    CHECK(echo["lambda"] == 0.75);
    SUBCASE("fixture block only echoes for the fixtures command") {
        CHECK_FALSE(echo.contains("fixture"));
        auto fe = echo_config(c, "fixtures");
        REQUIRE(fe.contains("fixture"));
        CHECK(fe["fixture"]["objects"] == 20);
        CHECK(fe["fixture"]["verify"] == true);
    }
    SUBCASE("echo is stable across reparses") {
        auto c2 = parse_config(j, "/b");
        CHECK(echo_config(c2, "evaluate") == echo);
    }
}

TEST_CASE("fixture block parses with bounds") {
    json j{{"fixture", json{{"objects", 3},
                            {"scenes", 2},
                            {"actions", 2},
                            {"videos", 0},
                            {"dim", 4},
                            {"max_attempts", 9},
                            {"verify", false}}}};
    auto c = parse_config(j, "/b");
    CHECK(c.fixture.objects == 3);
    CHECK(c.fixture.videos == 0);
    CHECK(c.fixture.dim == 4);
    CHECK(c.fixture.max_attempts == 9);
    CHECK_FALSE(c.fixture.verify);
    auto kind = testutil::raised_kind(
        [&] { parse_config(json{{"fixture", json{{"objects", 0}}}}, "/b"); });
    REQUIRE(kind.has_value());
    CHECK(*kind == ErrorKind::config);
    kind = testutil::raised_kind([&] { parse_config(json{{"fixture", 5}}, "/b"); });
    REQUIRE(kind.has_value());
    CHECK(*kind == ErrorKind::config);
}

TEST_CASE("subset fields parse") {
    auto c = parse_config(json{{"subset_sizes", json::array({2, 5, 10})}}, "/b");
    CHECK(c.subset_sizes == std::vector<uint32_t>{2, 5, 10});
    auto kind = testutil::raised_kind(
        [&] { parse_config(json{{"subset_sizes", json::array({0})}}, "/b"); });
    REQUIRE(kind.has_value());
    CHECK(*kind == ErrorKind::config);
    kind = testutil::raised_kind([&] { parse_config(json{{"subset_size", 0}}, "/b"); });
    REQUIRE(kind.has_value());
    CHECK(*kind == ErrorKind::config);
}
