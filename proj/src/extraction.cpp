#include "erdm/extraction.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace erdm {

namespace {

bool is_terminator(char32_t c) { return c == U'.' || c == U'!' || c == U'?'; }

std::size_t sentence_of(const std::vector<SentenceSpan>& spans, std::size_t offset) {
    auto it = std::upper_bound(spans.begin(), spans.end(), offset,
                               [](std::size_t off, const SentenceSpan& s) { return off < s.end; });
    return static_cast<std::size_t>(it - spans.begin());
}

}  // namespace

std::vector<SentenceSpan> segment_sentences(std::u32string_view text, const std::vector<EntityMention>& mentions) {
    std::vector<SentenceSpan> spans;
    std::size_t start = 0;
    std::size_t next_mention = 0;
    for (std::size_t i = 0; i + 1 < text.size(); ++i) {
        if (!is_terminator(text[i]) || !is_space(text[i + 1])) {
            continue;
        }
        std::size_t boundary = i + 1;
        while (next_mention < mentions.size() && mentions[next_mention].end <= boundary) {
            ++next_mention;
        }
        if (next_mention < mentions.size() && mentions[next_mention].start < boundary) {
            continue;  // inside a mention
        }
        spans.push_back(SentenceSpan{start, boundary});
        start = boundary;
    }
    spans.push_back(SentenceSpan{start, text.size()});
    return spans;
}

std::vector<SentenceSpan> segment_sentences(const AnnotatedDocument& doc) {
    return segment_sentences(utf8_decode(doc.text), doc.mentions);
}

std::vector<EntityExtraction> extract_entities(const AnnotatedDocument& doc) {
    std::vector<EntityExtraction> out;
    if (doc.mentions.empty()) {
        return out;
    }
    auto text = utf8_decode(doc.text);
    auto spans = segment_sentences(text, doc.mentions);
    std::vector<Terms> sentence_terms(spans.size());
    std::vector<bool> done(spans.size(), false);
    out.reserve(doc.mentions.size());
    for (const auto& m : doc.mentions) {
        auto s = sentence_of(spans, m.start);
        if (!done[s]) {
            sentence_terms[s] = tokenize(std::u32string_view(text).substr(spans[s].start, spans[s].end - spans[s].start));
            done[s] = true;
        }
        out.push_back(EntityExtraction{m.entity_id, doc.doc_id, sentence_terms[s]});
    }
    return out;
}

std::vector<RelationshipExtraction> extract_relationships(const AnnotatedDocument& doc, RelationshipContext context) {
    std::vector<RelationshipExtraction> out;
    if (doc.mentions.size() < 2) {
        return out;
    }
    auto text = utf8_decode(doc.text);
    std::u32string_view view(text);
    auto spans = segment_sentences(text, doc.mentions);
    const auto& ms = doc.mentions;
    std::size_t first = 0;
    while (first < ms.size()) {
        auto s = sentence_of(spans, ms[first].start);
        std::size_t last = first;
        while (last < ms.size() && sentence_of(spans, ms[last].start) == s) {
            ++last;
        }
        Terms sentence;
        if (context == RelationshipContext::full_sentence && last - first >= 2) {
            sentence = tokenize(view.substr(spans[s].start, spans[s].end - spans[s].start));
        }
        for (std::size_t i = first; i < last; ++i) {
            for (std::size_t j = i + 1; j < last; ++j) {
                if (ms[i].entity_id == ms[j].entity_id) {
                    continue;
                }
                Terms terms = context == RelationshipContext::full_sentence
                                  ? sentence
                                  : tokenize(view.substr(ms[i].end, ms[j].start - ms[i].end));
                out.push_back(RelationshipExtraction{EntityPair::normalized(ms[i].entity_id, ms[j].entity_id),
                                                     doc.doc_id, std::move(terms)});
            }
        }
        first = last;
    }
    return out;
}

std::string entity_extraction_json(const EntityExtraction& e) {
    nlohmann::json j{{"kind", "entity"}, {"id", e.entity_id}, {"doc_id", e.doc_id}, {"terms", e.terms}};
    return j.dump();
}

std::string relationship_extraction_json(const RelationshipExtraction& r) {
    nlohmann::json j{{"kind", "relationship"}, {"id", r.pair.key()}, {"doc_id", r.doc_id}, {"terms", r.terms}};
    return j.dump();
}

}  // namespace erdm
