#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "helpers.hpp"

using testutil::TempDir;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

// Runs a shell command, capturing stdout and stderr together.
RunResult run(const std::string& command) {
    RunResult r;
    FILE* pipe = popen((command + " 2>&1").c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string cli() {
    const char* path = std::getenv("ZSCOMP_CLI");
    REQUIRE_MESSAGE(path != nullptr, "ZSCOMP_CLI must point at the zscomp binary");
    return std::string("'") + path + "'";
}

std::string make_fixture(const TempDir& tmp) {
    auto r = run(cli() + " fixtures --output-dir '" + tmp.file("fx") +
                 "' --objects 10 --scenes 8 --actions 4 --videos 12 --dim 6 --seed 2");
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    return tmp.file("fx/config.json");
}

} // namespace

TEST_CASE("version and help exit cleanly") {
    auto v = run(cli() + " --version");
    CHECK(v.exit_code == 0);
    CHECK(v.output.find('.') != std::string::npos);
    auto h = run(cli() + " --help");
    CHECK(h.exit_code == 0);
    CHECK(h.output.find("select") != std::string::npos);
    CHECK(h.output.find("oracle-check") != std::string::npos);
}

TEST_CASE("missing subcommand is usage error 2") {
    auto r = run(cli());
    CHECK(r.exit_code == 2);
}

TEST_CASE("full command round trip") {
    TempDir tmp;
    std::string cfg = make_fixture(tmp);
    SUBCASE("select") {
        auto r = run(cli() + " select --config '" + cfg + "' --output-dir '" +
                     tmp.file("sel") + "' --k-compositions 5");
        CHECK(r.exit_code == 0);
        CHECK(r.output.find("\"command\": \"select\"") != std::string::npos);
    }
    SUBCASE("classify then evaluate") {
        auto r = run(cli() + " classify --config '" + cfg + "' --output-dir '" +
                     tmp.file("cls") + "'");
        CHECK(r.exit_code == 0);
        auto e = run(cli() + " evaluate --config '" + cfg + "' --output-dir '" +
                     tmp.file("ev") + "' --baseline-method object_only");
        CHECK(e.exit_code == 0);
        CHECK(e.output.find("accuracy") != std::string::npos);
    }
    SUBCASE("ablate with explicit methods") {
        auto r = run(cli() + " ablate --config '" + cfg + "' --output-dir '" +
                     tmp.file("ab") + "' --ablate-methods object_only,compositions");
        CHECK(r.exit_code == 0);
    }
    SUBCASE("oracle-check") {
        auto r = run(cli() + " oracle-check --config '" + cfg + "' --output-dir '" +
                     tmp.file("oc") + "' --k-compositions 5");
        CHECK(r.exit_code == 0);
        CHECK(r.output.find("\"pass\": true") != std::string::npos);
    }
}

TEST_CASE("config and argument errors exit 2") {
    TempDir tmp;
    std::string cfg = make_fixture(tmp);
    SUBCASE("lambda out of range names the field") {
        auto r = run(cli() + " classify --config '" + cfg + "' --output-dir '" +
                     tmp.file("x") + "' --lambda 1.5");
        CHECK(r.exit_code == 2);
        CHECK(r.output.find("lambda") != std::string::npos);
    }
    SUBCASE("unknown method") {
        auto r = run(cli() + " classify --config '" + cfg + "' --output-dir '" +
                     tmp.file("x") + "' --method sideways");
        CHECK(r.exit_code == 2);
        CHECK(r.output.find("sideways") != std::string::npos);
    }
    SUBCASE("select rejects single-source methods") {
        auto r = run(cli() + " select --config '" + cfg + "' --output-dir '" +
                     tmp.file("x") + "' --method object_only");
        CHECK(r.exit_code == 2);
        CHECK(r.output.find("method") != std::string::npos);
    }
    SUBCASE("missing input path names the field") {
        auto r = run(cli() + " classify --config '" + cfg + "' --output-dir '" +
                     tmp.file("x") + "' --objects-embeddings '" + tmp.file("absent.vec") + "'");
        CHECK(r.exit_code == 2);
        CHECK(r.output.find("objects_embeddings") != std::string::npos);
    }
    SUBCASE("nonexistent config file is rejected by the parser") {
        auto r = run(cli() + " classify --config '" + tmp.file("none.json") + "'");
        CHECK(r.exit_code == 2);
    }
}

TEST_CASE("data errors exit 1") {
    TempDir tmp;
    std::string cfg = make_fixture(tmp);
    // Corrupt one probability row so the file no longer parses as stochastic.
    std::string probs_path = tmp.file("fx/object_probabilities.csv");
    std::string csv = testutil::read_file(probs_path);
    auto second_line = csv.find('\n', csv.find('\n') + 1);
    REQUIRE(second_line != std::string::npos);
    std::string broken = csv.substr(0, csv.find('\n') + 1);
    broken += "video0000";
    for (int i = 0; i < 10; ++i) broken += ",0.9";
    broken += "\n";
    testutil::write_file(tmp.file("bad_probs.csv"), broken);
    auto r = run(cli() + " classify --config '" + cfg + "' --output-dir '" + tmp.file("x") +
                 "' --objects-probabilities '" + tmp.file("bad_probs.csv") + "'");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("error") != std::string::npos);
}

TEST_CASE("ZSCOMP_THREADS env var is accepted") {
    TempDir tmp;
    std::string cfg = make_fixture(tmp);
    auto r1 = run("ZSCOMP_THREADS=1 " + cli() + " classify --config '" + cfg +
                  "' --output-dir '" + tmp.file("t1") + "'");
    CHECK(r1.exit_code == 0);
    auto r4 = run("ZSCOMP_THREADS=4 " + cli() + " classify --config '" + cfg +
                  "' --output-dir '" + tmp.file("t4") + "'");
    CHECK(r4.exit_code == 0);
    CHECK(testutil::read_file(tmp.file("t1/scores.csv")) ==
          testutil::read_file(tmp.file("t4/scores.csv")));
}
