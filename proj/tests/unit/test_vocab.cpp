#include <doctest.h>

#include "core/vocab.hpp"

#include "helpers.hpp"

using namespace zscomp;
using testutil::TempDir;

TEST_CASE("vocabulary load skips comments and blanks, trims labels") {
    TempDir tmp;
    testutil::write_file(tmp.file("v.txt"), "# header\nalpha\n\n  beta  \n#x\ngamma\n");
    Vocabulary v = Vocabulary::load(tmp.file("v.txt"), SourceKind::objects);
    REQUIRE(v.size() == 3);
    CHECK(v.label(0) == "alpha");
    CHECK(v.label(1) == "beta");
    CHECK(v.label(2) == "gamma");
    CHECK(v.kind() == SourceKind::objects);
    CHECK(v.find("beta") == 1);
    CHECK_FALSE(v.find("delta").has_value());
}

TEST_CASE("vocabulary strips a utf-8 BOM on the first line") {
    TempDir tmp;
    testutil::write_file(tmp.file("v.txt"), "\xEF\xBB\xBF" "first\nsecond\n");
    Vocabulary v = Vocabulary::load(tmp.file("v.txt"), SourceKind::generic);
    REQUIRE(v.size() == 2);
    CHECK(v.label(0) == "first");
}

TEST_CASE("duplicate labels are a data error") {
    TempDir tmp;
    testutil::write_file(tmp.file("v.txt"), "a\nb\na\n");
    auto kind = testutil::raised_kind(
        [&] { Vocabulary::load(tmp.file("v.txt"), SourceKind::scenes); });
    REQUIRE(kind.has_value());
    CHECK(*kind == ErrorKind::data);
}

TEST_CASE("empty vocabulary is rejected") {
    TempDir tmp;
    testutil::write_file(tmp.file("v.txt"), "# only comments\n");
    auto kind = testutil::raised_kind(
        [&] { Vocabulary::load(tmp.file("v.txt"), SourceKind::actions); });
    REQUIRE(kind.has_value());
}

TEST_CASE("missing file is an io error") {
    auto kind = testutil::raised_kind(
        [] { Vocabulary::load("/no/such/vocab.txt", SourceKind::objects); });
    REQUIRE(kind.has_value());
    CHECK(*kind == ErrorKind::io);
}

TEST_CASE("save then load round-trips") {
    TempDir tmp;
    Vocabulary v = Vocabulary::from_labels(SourceKind::actions, {"run", "swim", "ride horse"});
    v.save(tmp.file("out.txt"));
    Vocabulary back = Vocabulary::load(tmp.file("out.txt"), SourceKind::actions);
    REQUIRE(back.size() == 3);
    CHECK(back.label(2) == "ride horse");
    CHECK(back.labels() == v.labels());
}
