#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "zscomp/zscomp.h"

#include "helpers.hpp"

using testutil::TempDir;

namespace {

void write_vocab(const std::string& path, const char* body) { testutil::write_file(path, body); }

} // namespace

TEST_CASE("version and status names") {
    REQUIRE(zsc_version() != nullptr);
    CHECK(std::string(zsc_version()).find('.') != std::string::npos);
    CHECK(std::string(zsc_status_name(ZSC_OK)) == "ok");
    CHECK(std::string(zsc_status_name(ZSC_ERR_CONFIG)) == "config");
    CHECK(std::string(zsc_status_name(ZSC_ERR_SIZE_GUARD)) == "size_guard");
    CHECK(zsc_status_name(static_cast<zsc_status>(999)) != nullptr);
}

TEST_CASE("vocabulary handles") {
    TempDir tmp;
    write_vocab(tmp.file("v.txt"), "# comment\nride horse\nice rink\n");
    zsc_vocab* v = nullptr;
    REQUIRE(zsc_vocab_load(tmp.file("v.txt").c_str(), ZSC_SOURCE_OBJECTS, &v) == ZSC_OK);
    REQUIRE(v != nullptr);
    CHECK(zsc_vocab_size(v) == 2);
    CHECK(std::string(zsc_vocab_label(v, 0)) == "ride horse");
    CHECK(zsc_vocab_label(v, 5) == nullptr);
    uint32_t id = 99;
    CHECK(zsc_vocab_find(v, "ice rink", &id) == 1);
    CHECK(id == 1);
    CHECK(zsc_vocab_find(v, "absent", &id) == 0);
    zsc_vocab_free(v);

    SUBCASE("missing file sets an error message") {
        zsc_vocab* bad = nullptr;
        zsc_status st = zsc_vocab_load("/no/such/file.txt", ZSC_SOURCE_SCENES, &bad);
        CHECK(st == ZSC_ERR_IO);
        CHECK(bad == nullptr);
        REQUIRE(zsc_last_error() != nullptr);
        CHECK(std::strlen(zsc_last_error()) > 0);
    }
    SUBCASE("null arguments are argument errors") {
        CHECK(zsc_vocab_load(nullptr, ZSC_SOURCE_OBJECTS, &v) == ZSC_ERR_ARGUMENT);
        CHECK(zsc_vocab_load(tmp.file("v.txt").c_str(), ZSC_SOURCE_OBJECTS, nullptr) ==
              ZSC_ERR_ARGUMENT);
    }
}

TEST_CASE("embeddings and cosine") {
    TempDir tmp;
    write_vocab(tmp.file("v.txt"), "a\nb\n");
    testutil::write_file(tmp.file("e.vec"), "a 1 0\nb 0 1\n");
    zsc_vocab* v = nullptr;
    REQUIRE(zsc_vocab_load(tmp.file("v.txt").c_str(), ZSC_SOURCE_OBJECTS, &v) == ZSC_OK);
    zsc_embeddings* e = nullptr;
    REQUIRE(zsc_embeddings_load(tmp.file("e.vec").c_str(), ZSC_EMBEDDINGS_WORD2VEC_TEXT, v,
                                ZSC_OOV_FAIL, &e) == ZSC_OK);
    CHECK(zsc_embeddings_dim(e) == 2);
    CHECK(zsc_embeddings_size(e) == 2);
    CHECK(zsc_embeddings_oov_count(e) == 0);
    const float* row = zsc_embeddings_vector(e, 0);
    REQUIRE(row != nullptr);
    CHECK(row[0] == 1.0f);
    CHECK(row[1] == 0.0f);
    CHECK(zsc_embeddings_vector(e, 9) == nullptr);

    double out = 0.0;
    const float u[2] = {1.0f, 0.0f};
    const float w[2] = {0.0f, 2.0f};
    CHECK(zsc_cosine(u, u, 2, &out) == ZSC_OK);
    CHECK(out == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(zsc_cosine(u, w, 2, &out) == ZSC_OK);
    CHECK(out == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(zsc_cosine(nullptr, w, 2, &out) == ZSC_ERR_ARGUMENT);

    SUBCASE("oov failure propagates kind and message") {
        write_vocab(tmp.file("v2.txt"), "a\nqqzz\n");
        zsc_vocab* v2 = nullptr;
        REQUIRE(zsc_vocab_load(tmp.file("v2.txt").c_str(), ZSC_SOURCE_OBJECTS, &v2) == ZSC_OK);
        zsc_embeddings* e2 = nullptr;
        CHECK(zsc_embeddings_load(tmp.file("e.vec").c_str(), ZSC_EMBEDDINGS_WORD2VEC_TEXT, v2,
                                  ZSC_OOV_FAIL, &e2) == ZSC_ERR_DATA);
        CHECK(std::string(zsc_last_error()).find("qqzz") != std::string::npos);
        CHECK(zsc_embeddings_load(tmp.file("e.vec").c_str(), ZSC_EMBEDDINGS_WORD2VEC_TEXT, v2,
                                  ZSC_OOV_ZERO, &e2) == ZSC_OK);
        CHECK(zsc_embeddings_oov_count(e2) == 1);
        zsc_embeddings_free(e2);
        zsc_vocab_free(v2);
    }

    zsc_embeddings_free(e);
    zsc_vocab_free(v);
}

TEST_CASE("probabilities") {
    TempDir tmp;
    testutil::write_file(tmp.file("p.csv"), "video_id,a,b\nv0,0.25,0.75\nv1,1,0\n");
    write_vocab(tmp.file("v.txt"), "a\nb\n");
    zsc_vocab* v = nullptr;
    REQUIRE(zsc_vocab_load(tmp.file("v.txt").c_str(), ZSC_SOURCE_OBJECTS, &v) == ZSC_OK);
    zsc_probs* p = nullptr;
    REQUIRE(zsc_probs_load(tmp.file("p.csv").c_str(), ZSC_PROBS_CSV, v, 0, &p) == ZSC_OK);
    CHECK(zsc_probs_videos(p) == 2);
    CHECK(zsc_probs_cols(p) == 2);
    CHECK(std::string(zsc_probs_video_id(p, 1)) == "v1");
    const float* row = zsc_probs_row(p, 0);
    REQUIRE(row != nullptr);
    CHECK(row[0] == 0.25f);
    CHECK(row[1] == 0.75f);
    CHECK(zsc_probs_row(p, 7) == nullptr);
    zsc_probs_free(p);

    SUBCASE("bad rows fail without renormalize and pass with it") {
        testutil::write_file(tmp.file("q.csv"), "video_id,a,b\nv0,0.3,0.3\n");
        zsc_probs* q = nullptr;
        CHECK(zsc_probs_load(tmp.file("q.csv").c_str(), ZSC_PROBS_CSV, v, 0, &q) ==
              ZSC_ERR_DATA);
        REQUIRE(zsc_probs_load(tmp.file("q.csv").c_str(), ZSC_PROBS_CSV, v, 1, &q) ==
                ZSC_OK);
        const float* r = zsc_probs_row(q, 0);
        CHECK(r[0] == doctest::Approx(0.5f).epsilon(1e-6));
        zsc_probs_free(q);
    }
    zsc_vocab_free(v);
}

TEST_CASE("space and selection through the C API") {
    TempDir tmp;
    write_vocab(tmp.file("ov.txt"), "o0\no1\no2\n");
    write_vocab(tmp.file("sv.txt"), "s0\ns1\n");
    testutil::write_file(tmp.file("oe.vec"), "o0 1 0 0\no1 0 1 0\no2 0.5 0.5 0\n");
    testutil::write_file(tmp.file("se.vec"), "s0 0 0 1\ns1 1 0 0\n");
    zsc_vocab *ov = nullptr, *sv = nullptr;
    REQUIRE(zsc_vocab_load(tmp.file("ov.txt").c_str(), ZSC_SOURCE_OBJECTS, &ov) == ZSC_OK);
    REQUIRE(zsc_vocab_load(tmp.file("sv.txt").c_str(), ZSC_SOURCE_SCENES, &sv) == ZSC_OK);
    zsc_embeddings *oe = nullptr, *se = nullptr;
    REQUIRE(zsc_embeddings_load(tmp.file("oe.vec").c_str(), ZSC_EMBEDDINGS_WORD2VEC_TEXT, ov,
                                ZSC_OOV_FAIL, &oe) == ZSC_OK);
    REQUIRE(zsc_embeddings_load(tmp.file("se.vec").c_str(), ZSC_EMBEDDINGS_WORD2VEC_TEXT, sv,
                                ZSC_OOV_FAIL, &se) == ZSC_OK);

    zsc_space* space = nullptr;
    REQUIRE(zsc_space_create(oe, se, 0, 0, 1, &space) == ZSC_OK);
    CHECK(zsc_space_compositions(space) == 6);

    const float action[3] = {1.0f, 0.0f, 0.0f};
    double sim = 0.0;
    REQUIRE(zsc_space_similarity(space, 0, 1, action, 3, &sim) == ZSC_OK);
    CHECK(sim == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(zsc_space_similarity(space, 9, 0, action, 3, &sim) == ZSC_ERR_ARGUMENT);

    zsc_selection_params params;
    zsc_selection_params_init(&params);
    CHECK(params.k == 250);
    CHECK(params.lambda == 0.75);
    CHECK(params.diversify == 1);
    params.k = 3;
    params.pool_size = -1;
    zsc_selection* sel = nullptr;
    REQUIRE(zsc_select(space, action, 3, 0, &params, &sel) == ZSC_OK);
    CHECK(zsc_selection_size(sel) == 3);
    uint32_t oid = 99, sid = 99;
    double s = 0, mmr = 0;
    REQUIRE(zsc_selection_member(sel, 0, &oid, &sid, &s, &mmr) == ZSC_OK);
    // (0,1): [1,0,0]+[1,0,0]=[2,0,0], exactly the action direction.
    CHECK(oid == 0);
    CHECK(sid == 1);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(mmr == doctest::Approx(0.75 * 1.0).epsilon(1e-6));
    CHECK(zsc_selection_member(sel, 8, &oid, &sid, &s, &mmr) == ZSC_ERR_ARGUMENT);
    zsc_selection_free(sel);

    SUBCASE("bad lambda is a config error") {
        zsc_selection_params bad = params;
        bad.lambda = 1.5;
        zsc_selection* none = nullptr;
        CHECK(zsc_select(space, action, 3, 0, &bad, &none) == ZSC_ERR_CONFIG);
        CHECK(none == nullptr);
    }

    zsc_space_free(space);
    zsc_embeddings_free(oe);
    zsc_embeddings_free(se);
    zsc_vocab_free(ov);
    zsc_vocab_free(sv);
}

TEST_CASE("zsc_run drives whole commands") {
    TempDir tmp;
    std::string cfg = std::string("{\"output_dir\":\"") + tmp.file("fx") +
                      "\",\"seed\":3,\"fixture\":{\"objects\":6,\"scenes\":5,"
                      "\"actions\":3,\"videos\":8,\"dim\":4}}";
    char* summary = nullptr;
    REQUIRE(zsc_run("fixtures", cfg.c_str(), tmp.path.c_str(), &summary) == ZSC_OK);
    REQUIRE(summary != nullptr);
    CHECK(std::string(summary).find("\"command\": \"fixtures\"") != std::string::npos);
    zsc_string_free(summary);

    SUBCASE("unknown command is an argument error") {
        char* out = nullptr;
        CHECK(zsc_run("warp", "{}", tmp.path.c_str(), &out) == ZSC_ERR_ARGUMENT);
        CHECK(out == nullptr);
    }
    SUBCASE("invalid json is a config error") {
        char* out = nullptr;
        CHECK(zsc_run("fixtures", "{not json", tmp.path.c_str(), &out) == ZSC_ERR_CONFIG);
        CHECK(std::string(zsc_last_error()).find("JSON") != std::string::npos);
    }
    SUBCASE("unknown config key is a config error naming it") {
        char* out = nullptr;
        CHECK(zsc_run("fixtures", "{\"nope\":1}", tmp.path.c_str(), &out) == ZSC_ERR_CONFIG);
        CHECK(std::string(zsc_last_error()).find("nope") != std::string::npos);
    }
}
