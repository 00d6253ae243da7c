#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/composition.hpp"
#include "core/embedding.hpp"
#include "core/rng.hpp"
#include "core/vocab.hpp"

#include "helpers.hpp"

using namespace zscomp;
using testutil::TempDir;

namespace {

EmbeddingTable table_of(SourceKind kind, const char* prefix, size_t count, size_t dim,
                        uint64_t seed) {
    std::vector<std::string> labels;
    for (size_t i = 0; i < count; ++i) labels.push_back(std::string(prefix) + std::to_string(i));
    Vocabulary v = Vocabulary::from_labels(kind, std::move(labels));
    SplitMix64 g(seed);
    std::vector<float> rows(count * dim);
    for (auto& x : rows) x = static_cast<float>(g.centered());
    return EmbeddingTable::from_rows(dim, std::move(rows), v);
}

EmbeddingTable table_from(SourceKind kind, size_t dim, std::vector<float> rows) {
    size_t count = rows.size() / dim;
    std::vector<std::string> labels;
    for (size_t i = 0; i < count; ++i) labels.push_back("l" + std::to_string(i));
    Vocabulary v = Vocabulary::from_labels(kind, std::move(labels));
    return EmbeddingTable::from_rows(dim, std::move(rows), v);
}

double naive_cos(std::span<const float> u, std::span<const float> v) {
    double dot = 0, nu = 0, nv = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        dot += double(u[i]) * v[i];
        nu += double(u[i]) * u[i];
        nv += double(v[i]) * v[i];
    }
    if (nu == 0 || nv == 0) return 0;
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

} // namespace

TEST_CASE("composition_embedding is the elementwise sum") {
    EmbeddingTable obj = table_from(SourceKind::objects, 2, {1, 2});
    EmbeddingTable scn = table_from(SourceKind::scenes, 2, {3, 4});
    CompositionSpace space(obj, scn);
    auto e = space.composition_embedding({0, 0});
    CHECK(e == std::vector<float>{4, 6});
}

TEST_CASE("zero scene leaves the object vector unchanged") {
    EmbeddingTable obj = table_from(SourceKind::objects, 2, {1, 2});
    EmbeddingTable scn = table_from(SourceKind::scenes, 2, {0, 0});
    CompositionSpace space(obj, scn);
    CHECK(space.composition_embedding({0, 0}) == std::vector<float>{1, 2});
}

TEST_CASE("cancelling pair flags downstream degeneracy") {
    EmbeddingTable obj = table_from(SourceKind::objects, 2, {1, -1});
    EmbeddingTable scn = table_from(SourceKind::scenes, 2, {-1, 1});
    CompositionSpace space(obj, scn);
    CHECK(space.composition_embedding({0, 0}) == std::vector<float>{0, 0});
    space.build_caches(1);
    std::vector<float> action{1, 1};
    auto ctx = space.prepare_action(action);
    CHECK(space.similarity_from(ctx, 0, 0) == 0.0);
    CHECK(space.degenerate_count() == 1);
}

TEST_CASE("decomposed similarity spec examples") {
    EmbeddingTable obj = table_from(SourceKind::objects, 2, {1, 0});
    EmbeddingTable scn = table_from(SourceKind::scenes, 2, {0, 1});
    CompositionSpace space(obj, scn);
    space.build_caches(1);
    std::vector<float> a{1, 1};
    auto ctx = space.prepare_action(a);
    CHECK(space.similarity_from(ctx, 0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    // Orthogonal in a 2-d space needs a third axis; use 3-d tables instead.
    EmbeddingTable obj3 = table_from(SourceKind::objects, 3, {1, 0, 0});
    EmbeddingTable scn3 = table_from(SourceKind::scenes, 3, {0, 1, 0});
    CompositionSpace space3(obj3, scn3);
    space3.build_caches(1);
    std::vector<float> a3{0, 0, 5};
    auto ctx3 = space3.prepare_action(a3);
    CHECK(space3.similarity_from(ctx3, 0, 0) == 0.0);
}

TEST_CASE("decomposed similarity matches naive cosine on random 5-d vectors") {
    EmbeddingTable obj = table_of(SourceKind::objects, "o", 12, 5, 100);
    EmbeddingTable scn = table_of(SourceKind::scenes, "s", 9, 5, 200);
    CompositionSpace space(obj, scn);
    space.build_caches(2);
    SplitMix64 g(300);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<float> a(5);
        for (auto& x : a) x = static_cast<float>(g.centered());
        auto ctx = space.prepare_action(a);
        for (uint32_t o = 0; o < 12; ++o)
            for (uint32_t s = 0; s < 9; ++s) {
                std::vector<float> summed(5);
                for (size_t d = 0; d < 5; ++d)
                    summed[d] = obj.vector(o)[d] + scn.vector(s)[d];
                double want = naive_cos(summed, a);
                CHECK(space.similarity_from(ctx, o, s) ==
                      doctest::Approx(want).epsilon(1e-5));
                CHECK(space.action_similarity({o, s}, a) ==
                      doctest::Approx(want).epsilon(1e-5));
            }
    }
}

TEST_CASE("pair_norm identity holds within 1e-4 relative") {
    EmbeddingTable obj = table_of(SourceKind::objects, "o", 20, 16, 1);
    EmbeddingTable scn = table_of(SourceKind::scenes, "s", 15, 16, 2);
    CompositionSpace space(obj, scn);
    space.build_caches(1);
    for (uint32_t o = 0; o < 20; ++o)
        for (uint32_t s = 0; s < 15; ++s) {
            double no = space.object_norm(o), ns = space.scene_norm(s);
            double lhs = double(space.pair_norm(o, s)) * space.pair_norm(o, s);
            double rhs = no * no + ns * ns + 2.0 * space.cross_dot(o, s);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-4));
        }
}

TEST_CASE("enumeration order is object-major") {
    EmbeddingTable obj = table_of(SourceKind::objects, "o", 2, 3, 5);
    EmbeddingTable scn = table_of(SourceKind::scenes, "s", 2, 3, 6);
    CompositionSpace space(obj, scn);
    std::vector<CompositionRef> seen;
    space.for_each_composition([&](CompositionRef c) { seen.push_back(c); });
    REQUIRE(seen.size() == 4);
    CHECK(seen[0] == CompositionRef{0, 0});
    CHECK(seen[1] == CompositionRef{0, 1});
    CHECK(seen[2] == CompositionRef{1, 0});
    CHECK(seen[3] == CompositionRef{1, 1});
}

TEST_CASE("all-orthogonal fixture scores zero everywhere") {
    // Objects and scenes live on axes 0..3, the action on axis 4.
    std::vector<float> orows(2 * 5, 0.0f), srows(2 * 5, 0.0f);
    orows[0 * 5 + 0] = 1.0f;
    orows[1 * 5 + 1] = 1.0f;
    srows[0 * 5 + 2] = 1.0f;
    srows[1 * 5 + 3] = 1.0f;
    EmbeddingTable obj = table_from(SourceKind::objects, 5, orows);
    EmbeddingTable scn = table_from(SourceKind::scenes, 5, srows);
    CompositionSpace space(obj, scn);
    space.build_caches(1);
    std::vector<float> a(5, 0.0f);
    a[4] = 1.0f;
    auto ctx = space.prepare_action(a);
    space.score_all(ctx, [&](CompositionRef, double sim) { CHECK(sim == 0.0); });
}

TEST_CASE("exclude_self_pairs drops the diagonal") {
    EmbeddingTable obj = table_of(SourceKind::objects, "o", 3, 4, 7);
    EmbeddingTable scn = table_of(SourceKind::scenes, "s", 3, 4, 8);
    SpaceOptions opts;
    opts.exclude_self_pairs = true;
    CompositionSpace space(obj, scn, opts);
    CHECK(space.composition_count() == 6);
    CHECK(space.skipped(1, 1));
    CHECK_FALSE(space.skipped(1, 2));
    size_t n = 0;
    space.for_each_composition([&](CompositionRef c) {
        CHECK(c.object_id != c.scene_id);
        ++n;
    });
    CHECK(n == 6);
}

TEST_CASE("normalize_before_sum uses unit vectors") {
    EmbeddingTable obj = table_from(SourceKind::objects, 2, {3, 0});
    EmbeddingTable scn = table_from(SourceKind::scenes, 2, {0, 4});
    SpaceOptions opts;
    opts.normalize_before_sum = true;
    CompositionSpace space(obj, scn, opts);
    auto e = space.composition_embedding({0, 0});
    CHECK(e[0] == doctest::Approx(1.0f).epsilon(1e-6));
    CHECK(e[1] == doctest::Approx(1.0f).epsilon(1e-6));
}

TEST_CASE("pair_similarity spec examples") {
    SUBCASE("identical compositions give 1") {
        EmbeddingTable obj = table_of(SourceKind::objects, "o", 4, 6, 11);
        EmbeddingTable scn = table_of(SourceKind::scenes, "s", 4, 6, 12);
        CompositionSpace space(obj, scn);
        space.build_caches(1);
        CHECK(space.pair_similarity({2, 3}, {2, 3}) == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("shared object with orthogonal unit scenes gives 0.5") {
        // o on axis 0; scenes on axes 1 and 2; all unit norm.
        EmbeddingTable obj = table_from(SourceKind::objects, 3, {1, 0, 0});
        EmbeddingTable scn = table_from(SourceKind::scenes, 3, {0, 1, 0, 0, 0, 1});
        CompositionSpace space(obj, scn);
        space.build_caches(1);
        CHECK(space.pair_similarity({0, 0}, {0, 1}) == doctest::Approx(0.5).epsilon(1e-6));
    }
    SUBCASE("random pairs match naive cosine of summed embeddings") {
        EmbeddingTable obj = table_of(SourceKind::objects, "o", 6, 8, 21);
        EmbeddingTable scn = table_of(SourceKind::scenes, "s", 5, 8, 22);
        CompositionSpace space(obj, scn);
        space.build_caches(1);
        SplitMix64 g(23);
        for (int i = 0; i < 40; ++i) {
            CompositionRef c1{static_cast<uint32_t>(g.below(6)),
                              static_cast<uint32_t>(g.below(5))};
            CompositionRef c2{static_cast<uint32_t>(g.below(6)),
                              static_cast<uint32_t>(g.below(5))};
            auto e1 = space.composition_embedding(c1);
            auto e2 = space.composition_embedding(c2);
            CHECK(space.pair_similarity(c1, c2) ==
                  doctest::Approx(naive_cos(e1, e2)).epsilon(1e-5));
        }
    }
}

TEST_CASE("weight is the object-scene cosine") {
    EmbeddingTable obj = table_from(SourceKind::objects, 2, {1, 0, 0, 2});
    EmbeddingTable scn = table_from(SourceKind::scenes, 2, {1, 0, 0, 0});
    CompositionSpace space(obj, scn);
    CHECK(space.weight({0, 0}) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(space.weight({1, 0}) == 0.0);
    // Zero-norm member yields weight 0.
    CHECK(space.weight({0, 1}) == 0.0);
}

TEST_CASE("cache files round-trip") {
    TempDir tmp;
    EmbeddingTable obj = table_of(SourceKind::objects, "o", 7, 9, 31);
    EmbeddingTable scn = table_of(SourceKind::scenes, "s", 5, 9, 32);
    CompositionSpace space(obj, scn);
    space.build_caches(2);
    space.save_cache(tmp.file("c.zspc"));
    CompositionSpace fresh(obj, scn);
    CHECK_FALSE(fresh.caches_built());
    fresh.load_cache(tmp.file("c.zspc"));
    REQUIRE(fresh.caches_built());
    for (uint32_t o = 0; o < 7; ++o)
        for (uint32_t s = 0; s < 5; ++s) {
            CHECK(fresh.pair_norm(o, s) == space.pair_norm(o, s));
            CHECK(fresh.cross_dot(o, s) == space.cross_dot(o, s));
        }
    SUBCASE("dimension mismatch on load is rejected") {
        EmbeddingTable obj2 = table_of(SourceKind::objects, "o", 6, 9, 33);
        CompositionSpace other(obj2, scn);
        auto kind = testutil::raised_kind([&] { other.load_cache(tmp.file("c.zspc")); });
        REQUIRE(kind.has_value());
        CHECK(*kind == ErrorKind::format);
    }
}

TEST_CASE("dim mismatch between tables is an argument error") {
    EmbeddingTable obj = table_of(SourceKind::objects, "o", 2, 4, 41);
    EmbeddingTable scn = table_of(SourceKind::scenes, "s", 2, 5, 42);
    auto kind = testutil::raised_kind([&] { CompositionSpace space(obj, scn); });
    REQUIRE(kind.has_value());
    CHECK(*kind == ErrorKind::argument);
}

TEST_CASE("thread counts do not change cache bytes") {
    EmbeddingTable obj = table_of(SourceKind::objects, "o", 16, 12, 51);
    EmbeddingTable scn = table_of(SourceKind::scenes, "s", 11, 12, 52);
    CompositionSpace one(obj, scn), eight(obj, scn);
    one.build_caches(1);
    eight.build_caches(8);
    for (uint32_t o = 0; o < 16; ++o)
        for (uint32_t s = 0; s < 11; ++s) {
            CHECK(one.pair_norm(o, s) == eight.pair_norm(o, s));
            CHECK(one.cross_dot(o, s) == eight.cross_dot(o, s));
        }
}
