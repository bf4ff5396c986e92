#include <doctest.h>

#include <sstream>

#include "erdm/cli.hpp"
#include "test_helpers.hpp"

using namespace test;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = erdm::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("help and usage errors") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"--help"}).out.find("build-index") != std::string::npos);
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    auto r = run({"evaluate", "--run", "x", "--qrels", "y", "--bogus"});
    CHECK(r.code == 2);
    CHECK(r.err.find("--bogus") != std::string::npos);
    CHECK(run({"evaluate", "--run", "x"}).code == 2);
    CHECK(run({"inspect", "--index", "i", "--entity", "a", "--pair", "a|b"}).code == 2);
}

TEST_CASE("missing inputs name the path") {
    auto dir = scratch_dir("cli_missing");
    auto missing = (dir / "no_such_index").string();
    auto r = run({"search", "--index", missing, "--queries", (data_dir() / "fixture_queries.tsv").string(),
                  "--model", "ef-lm", "--out", (dir / "run.tsv").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find(missing) != std::string::npos);

    r = run({"build-index", "--corpus", (dir / "nothing.jsonl").string(), "--out", (dir / "idx").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("nothing.jsonl") != std::string::npos);
}

TEST_CASE("index, search, evaluate and inspect on the fixture") {
    auto dir = scratch_dir("cli_pipeline");
    auto idx = (dir / "idx").string();
    auto queries = (data_dir() / "fixture_queries.tsv").string();
    auto qrels = (data_dir() / "fixture_qrels.tsv").string();
    auto r = run({"build-index", "--corpus", (data_dir() / "fixture_corpus.jsonl").string(), "--out", idx,
                  "--sentence-pairs"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(r.out.find("documents\t14\n") != std::string::npos);

    for (const char* model : {"ef-lm", "ef-bm25", "erdm-lm", "erdm-bm25"}) {
        auto run_path = (dir / (std::string(model) + ".tsv")).string();
        r = run({"search", "--index", idx, "--queries", queries, "--model", model, "--out", run_path});
        REQUIRE_MESSAGE(r.code == 0, r.err);
        r = run({"evaluate", "--run", run_path, "--qrels", qrels, "--per-query"});
        CHECK_MESSAGE(r.code == 0, r.err);
        CHECK(r.out.rfind("metric\tvalue\nmap@100\t", 0) == 0);
    }

    // Baselines only take three-part queries; Q3 has five.
    r = run({"search", "--index", idx, "--queries", queries, "--model", "base-r", "--out",
             (dir / "base.tsv").string()});
    CHECK(r.code == 1);

    r = run({"search", "--index", idx, "--queries", queries, "--model", "ef-lm", "--weights", "w.json", "--out",
             (dir / "x.tsv").string()});
    CHECK(r.code == 1);

    r = run({"inspect", "--index", idx, "--pair", "E_shayk|E_ronaldo", "--top", "5"});
    CHECK_MESSAGE(r.code == 0, r.err);
    CHECK(r.out.find("E_ronaldo|E_shayk") != std::string::npos);
    r = run({"inspect", "--index", idx, "--entity", "E_nobody"});
    CHECK(r.code == 1);

    r = run({"train", "--index", idx, "--queries", queries, "--qrels", qrels, "--model", "erdm-lm", "--folds",
             "3", "--out", (dir / "train").string()});
    CHECK_MESSAGE(r.code == 0, r.err);
    CHECK(std::filesystem::exists(dir / "train" / "weights.json"));
    CHECK(std::filesystem::exists(dir / "train" / "fold_2.json"));
    r = run({"search", "--index", idx, "--queries", queries, "--model", "erdm-lm", "--weights",
             (dir / "train").string(), "--out", (dir / "cv.tsv").string()});
    CHECK_MESSAGE(r.code == 0, r.err);
}
