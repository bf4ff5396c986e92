#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "erdm/corpus.hpp"
#include "erdm/text.hpp"
#include "erdm/tuple.hpp"

namespace erdm {

/// Half-open sentence span in Unicode scalar offsets.
struct SentenceSpan {
    std::size_t start = 0;
    std::size_t end = 0;

    friend bool operator==(const SentenceSpan&, const SentenceSpan&) = default;
};

/// Split after '.', '!' or '?' when followed by whitespace. The spans
/// partition the text; a boundary that would cut through a mention is dropped.
std::vector<SentenceSpan> segment_sentences(const AnnotatedDocument& doc);
std::vector<SentenceSpan> segment_sentences(std::u32string_view text, const std::vector<EntityMention>& mentions);

struct EntityExtraction {
    EntityId entity_id;
    std::string doc_id;
    Terms terms;  // tokens of the sentence containing the mention

    friend bool operator==(const EntityExtraction&, const EntityExtraction&) = default;
};

struct RelationshipExtraction {
    EntityPair pair;
    std::string doc_id;
    Terms terms;  // may be empty for adjacent mentions

    friend bool operator==(const RelationshipExtraction&, const RelationshipExtraction&) = default;
};

/// What text a relationship extraction keeps: the separating string between
/// the two mentions, or the whole sentence (the pair index used by BaseR).
enum class RelationshipContext { separating_string, full_sentence };

std::vector<EntityExtraction> extract_entities(const AnnotatedDocument& doc);
std::vector<RelationshipExtraction> extract_relationships(
    const AnnotatedDocument& doc, RelationshipContext context = RelationshipContext::separating_string);

std::string entity_extraction_json(const EntityExtraction& e);
std::string relationship_extraction_json(const RelationshipExtraction& r);

}  // namespace erdm
