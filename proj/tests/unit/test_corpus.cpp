#include <doctest.h>

#include "erdm/corpus.hpp"
#include "erdm/error.hpp"
#include "test_helpers.hpp"

using namespace erdm;

TEST_CASE("parse a single annotated document") {
    auto dir = test::scratch_dir("corpus_one");
    test::write_file(dir / "c.jsonl",
                     R"({"doc_id":"d1","text":"Apple signed a contract with Foxconn",)"
                     R"("mentions":[{"entity_id":"E_apple","start":0,"end":5},{"entity_id":"E_foxconn","start":29,"end":36}]})"
                     "\n");
    auto docs = load_corpus(dir / "c.jsonl");
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].doc_id == "d1");
    REQUIRE(docs[0].mentions.size() == 2);
    CHECK(docs[0].mentions[1] == EntityMention{"E_foxconn", 29, 36});
}

TEST_CASE("empty corpus file yields no documents") {
    auto dir = test::scratch_dir("corpus_empty");
    test::write_file(dir / "c.jsonl", "");
    CHECK(load_corpus(dir / "c.jsonl").empty());
    test::write_file(dir / "blank.jsonl", "\n\n");
    CHECK(load_corpus(dir / "blank.jsonl").empty());
}

TEST_CASE("document validation") {
    CHECK_THROWS_AS(parse_document(R"({"doc_id":"d","text":"abc","mentions":[{"entity_id":"E","start":1,"end":9}]})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_document(R"({"doc_id":"d","text":"abcdef","mentions":[{"entity_id":"E","start":3,"end":3}]})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_document(R"({"doc_id":"d","text":"abcdef","mentions":[)"
                                   R"({"entity_id":"E","start":0,"end":3},{"entity_id":"F","start":2,"end":4}]})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_document(R"({"doc_id":"d","text":"abc","mentions":[{"entity_id":"a|b","start":0,"end":1}]})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_document(R"({"doc_id":"d","text":"abc"})"), ParseError);
    CHECK_THROWS_AS(parse_document("not json"), ParseError);

    // Offsets count Unicode scalar values, not bytes.
    auto doc = parse_document(R"({"doc_id":"d","text":"Müller met Özil","mentions":[)"
                              R"({"entity_id":"E_o","start":11,"end":15},{"entity_id":"E_m","start":0,"end":6}]})");
    CHECK(doc.mentions.front().entity_id == "E_m");  // sorted by start
}

TEST_CASE("corpus errors carry the line number") {
    auto dir = test::scratch_dir("corpus_line");
    test::write_file(dir / "c.jsonl", "{\"doc_id\":\"d1\",\"text\":\"x\",\"mentions\":[]}\n\n{broken\n");
    try {
        load_corpus(dir / "c.jsonl");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
    CHECK_THROWS_AS(load_corpus(dir / "missing.jsonl"), Error);
}

TEST_CASE("documents round trip through the line format") {
    auto docs = test::fixture_corpus();
    for (const auto& d : docs) {
        CHECK(parse_document(serialize_document(d)) == d);
    }
}

TEST_CASE("qrels parsing") {
    auto q = parse_qrels("Q1\tE_a|E_b\t1\n");
    REQUIRE(q.size() == 1);
    REQUIRE(q["Q1"].size() == 1);
    CHECK(q["Q1"][0].tuple == EntityTuple{"E_a", "E_b"});
    CHECK(q["Q1"][0].relevance == 1);

    auto two = parse_qrels("Q1\tE_a|E_b\t1\nQ1\tE_c|E_d\t0\n");
    CHECK(two.size() == 1);
    CHECK(two["Q1"].size() == 2);
    CHECK(count_relevant(two["Q1"]) == 1);

    CHECK_THROWS_AS(parse_qrels("Q1\tE_a|E_b\t1\nQ1\tE_a|E_b\t1\n"), ValidationError);
    CHECK_THROWS_AS(parse_qrels("Q1\tE_a|E_b\t1\nQ1\tE_b|E_a\t2\n"), ValidationError);  // same pair reversed
    CHECK_THROWS_AS(parse_qrels("Q1\tE_a|E_b\t-1\n"), ValidationError);
    CHECK_THROWS_AS(parse_qrels("Q1\tE_a|E_b\n"), ParseError);
    CHECK_THROWS_AS(parse_qrels("Q1\tE_a|E_b\tx\n"), ParseError);
    CHECK_THROWS_AS(parse_qrels("Q1\tE_a|E_b\t1\nQ1\tE_a|E_b|E_c\t1\n"), ValidationError);
    CHECK_THROWS_AS(parse_qrels("Q1\tE_a|E_b\t1\n", std::map<std::string, std::size_t>{{"Q1", 3}}), ValidationError);

    auto reversed = parse_qrels("Q1\tE_b|E_a\t1\nQ2\tC|B|A\t1\n");
    CHECK(reversed["Q1"][0].tuple == EntityTuple{"E_a", "E_b"});
    CHECK(reversed["Q2"][0].tuple == EntityTuple{"A", "B", "C"});
}

TEST_CASE("qrels round trip") {
    auto dir = test::scratch_dir("qrels_rt");
    auto q = load_qrels(test::data_dir() / "fixture_qrels.tsv");
    write_qrels(dir / "q.tsv", q);
    CHECK(load_qrels(dir / "q.tsv") == q);
}
