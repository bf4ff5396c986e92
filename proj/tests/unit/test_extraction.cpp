#include <doctest.h>

#include <algorithm>
#include <set>

#include "erdm/extraction.hpp"
#include "naive_oracle.hpp"
#include "test_helpers.hpp"

using namespace erdm;

namespace {

AnnotatedDocument doc(std::string text, std::vector<EntityMention> mentions) {
    AnnotatedDocument d{"d", std::move(text), std::move(mentions)};
    validate_document(d);
    return d;
}

}  // namespace

TEST_CASE("sentence segmentation") {
    auto two = segment_sentences(doc("A met B. C left.", {}));
    REQUIRE(two.size() == 2);
    CHECK(two[0] == SentenceSpan{0, 8});
    CHECK(two[1] == SentenceSpan{8, 16});

    auto one = segment_sentences(doc("no terminator here", {}));
    REQUIRE(one.size() == 1);
    CHECK(one[0] == SentenceSpan{0, 18});

    CHECK(segment_sentences(doc("Really? Yes! Fine.", {})).size() == 3);
    CHECK(segment_sentences(doc("Version 2.0 is out", {})).size() == 1);  // no space after the dot
}

TEST_CASE("boundary inside a mention is suppressed") {
    auto d = doc("The U.S. Navy signed a deal. Boeing agreed.", {{"E_navy", 4, 13}, {"E_boeing", 29, 35}});
    auto spans = segment_sentences(d);
    REQUIRE(spans.size() == 2);
    CHECK(spans[0] == SentenceSpan{0, 28});
    auto ents = extract_entities(d);
    REQUIRE(ents.size() == 2);
    CHECK(ents[0].terms == Terms{"the", "u", "s", "navy", "signed", "a", "deal"});
    CHECK(ents[1].terms == Terms{"boeing", "agreed"});
}

TEST_CASE("entity extractions") {
    auto d = doc("Apple signed a contract with Foxconn", {{"E_apple", 0, 5}, {"E_foxconn", 29, 36}});
    auto ents = extract_entities(d);
    REQUIRE(ents.size() == 2);
    Terms expected{"apple", "signed", "a", "contract", "with", "foxconn"};
    CHECK(ents[0].entity_id == "E_apple");
    CHECK(ents[0].terms == expected);
    CHECK(ents[1].terms == expected);
    CHECK(ents[1].doc_id == "d");

    CHECK(extract_entities(doc("No mentions. At all.", {})).empty());
}

TEST_CASE("relationship extractions use the separating string") {
    auto d = doc("Apple signed a contract with Foxconn", {{"E_apple", 0, 5}, {"E_foxconn", 29, 36}});
    auto rels = extract_relationships(d);
    REQUIRE(rels.size() == 1);
    CHECK(rels[0].pair == EntityPair{"E_apple", "E_foxconn"});
    CHECK(rels[0].terms == Terms{"signed", "a", "contract", "with"});

    auto full = extract_relationships(d, RelationshipContext::full_sentence);
    REQUIRE(full.size() == 1);
    CHECK(full[0].terms == Terms{"apple", "signed", "a", "contract", "with", "foxconn"});

    CHECK(extract_relationships(doc("Only Apple here. And Foxconn there.", {{"A", 5, 10}, {"F", 21, 28}})).empty());
    CHECK(extract_relationships(doc("Apple and Apple.", {{"A", 0, 5}, {"A", 10, 15}})).empty());
    auto adjacent = extract_relationships(doc("AB", {{"A", 0, 1}, {"B", 1, 2}}));
    REQUIRE(adjacent.size() == 1);
    CHECK(adjacent[0].terms.empty());
}

TEST_CASE("three mentions give three pairs, each with its own separating tokens") {
    // A x B y z C
    auto d = doc("Ann x Bob y z Cat", {{"A", 0, 3}, {"B", 6, 9}, {"C", 14, 17}});
    auto rels = extract_relationships(d);
    std::map<std::string, Terms> got;
    for (const auto& r : rels) {
        got[r.pair.key()] = r.terms;
    }
    // Brute force: tokens strictly between each ordered pair of mention spans.
    std::map<std::string, Terms> expected;
    for (std::size_t i = 0; i < d.mentions.size(); ++i) {
        for (std::size_t j = i + 1; j < d.mentions.size(); ++j) {
            const auto& a = d.mentions[i];
            const auto& b = d.mentions[j];
            expected[EntityPair::normalized(a.entity_id, b.entity_id).key()] =
                oracle::ascii_tokens(d.text.substr(a.end, b.start - a.end));
        }
    }
    CHECK(rels.size() == 3);
    CHECK(got == expected);
    CHECK(got["A|C"] == Terms{"x", "bob", "y", "z"});
}

TEST_CASE("fixture extractions match a hand-segmented oracle") {
    auto corpus = test::fixture_corpus();
    auto raw = oracle::gather(corpus);
    auto raw_full = oracle::gather(corpus, true);
    std::map<std::string, std::vector<Terms>> ents, rels, full;
    for (const auto& d : corpus) {
        for (auto& e : extract_entities(d)) {
            ents[e.entity_id].push_back(e.terms);
        }
        for (auto& r : extract_relationships(d)) {
            rels[r.pair.key()].push_back(r.terms);
        }
        for (auto& r : extract_relationships(d, RelationshipContext::full_sentence)) {
            full[r.pair.key()].push_back(r.terms);
        }
    }
    auto sorted = [](std::map<std::string, std::vector<Terms>> m) {
        for (auto& [k, v] : m) {
            std::sort(v.begin(), v.end());
        }
        return m;
    };
    CHECK(sorted(ents) == sorted(raw.entities));
    CHECK(sorted(rels) == sorted(raw.pairs));
    CHECK(sorted(full) == sorted(raw_full.pairs));
    // Two sentences each in d06 and d13: every extraction stays inside its own sentence.
    CHECK(raw.entities.at("E_boeing").size() == 4);
}

TEST_CASE("extraction JSON dump") {
    EntityExtraction e{"E_a", "d1", {"x", "y"}};
    CHECK(entity_extraction_json(e) == R"({"doc_id":"d1","id":"E_a","kind":"entity","terms":["x","y"]})");
    RelationshipExtraction r{EntityPair{"A", "B"}, "d1", {}};
    CHECK(relationship_extraction_json(r) == R"({"doc_id":"d1","id":"A|B","kind":"relationship","terms":[]})");
}
