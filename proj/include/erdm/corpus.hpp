#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "erdm/tuple.hpp"

namespace erdm {

/// Span over the document text; offsets count Unicode scalar values, `end`
/// is exclusive.
struct EntityMention {
    EntityId entity_id;
    std::size_t start = 0;
    std::size_t end = 0;

    friend bool operator==(const EntityMention&, const EntityMention&) = default;
};

struct AnnotatedDocument {
    std::string doc_id;
    std::string text;
    std::vector<EntityMention> mentions;  // sorted by start, non-overlapping

    friend bool operator==(const AnnotatedDocument&, const AnnotatedDocument&) = default;
};

/// Sorts mentions by start offset and checks every span invariant.
/// Throws ValidationError naming the doc_id.
void validate_document(AnnotatedDocument& doc);

/// Parse one corpus line (a JSON object). The result is validated.
AnnotatedDocument parse_document(std::string_view line);
std::string serialize_document(const AnnotatedDocument& doc);

/// Stream documents in file order; blank lines are skipped. Parse and
/// validation failures are rethrown with the 1-based line number.
void for_each_document(const std::filesystem::path& path,
                       const std::function<void(AnnotatedDocument&&)>& fn);
std::vector<AnnotatedDocument> load_corpus(const std::filesystem::path& path);
void write_corpus(const std::filesystem::path& path, const std::vector<AnnotatedDocument>& docs);

struct QrelRecord {
    std::string query_id;
    EntityTuple tuple;  // canonical orientation
    int relevance = 0;

    friend bool operator==(const QrelRecord&, const QrelRecord&) = default;
};

using Qrels = std::map<std::string, std::vector<QrelRecord>>;

/// Load a TAB-separated qrels file. When `arities` is given (query id ->
/// expected tuple arity) every record is checked against it; records of one
/// query must always agree in arity. Duplicate (query, tuple) is an error.
Qrels load_qrels(const std::filesystem::path& path,
                 const std::optional<std::map<std::string, std::size_t>>& arities = std::nullopt);
Qrels parse_qrels(std::string_view content,
                  const std::optional<std::map<std::string, std::size_t>>& arities = std::nullopt);
void write_qrels(const std::filesystem::path& path, const Qrels& qrels);

/// Number of records with relevance > 0.
std::size_t count_relevant(const std::vector<QrelRecord>& records);

}  // namespace erdm
