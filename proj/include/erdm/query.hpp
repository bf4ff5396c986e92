#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "erdm/text.hpp"

namespace erdm {

enum class PartKind { entity, relationship };

struct SubQuery {
    PartKind kind = PartKind::entity;
    std::string text;  // as written in the query file
    Terms terms;       // tokenized, never empty

    friend bool operator==(const SubQuery&, const SubQuery&) = default;
};

/// A relational E-R query: entity and relationship sub-queries alternating,
/// starting and ending with an entity part.
class ERQuery {
  public:
    static constexpr std::size_t max_parts = 5;

    /// Throws ValidationError unless the parts form a valid chain of 3 or 5.
    ERQuery(std::string id, std::vector<SubQuery> parts);

    const std::string& id() const { return id_; }
    const std::vector<SubQuery>& parts() const { return parts_; }
    std::size_t size() const { return parts_.size(); }
    std::size_t arity() const { return (parts_.size() + 1) / 2; }
    std::size_t num_relationships() const { return (parts_.size() - 1) / 2; }

    /// i-th entity sub-query (0-based), i.e. part 2i.
    const SubQuery& entity(std::size_t i) const { return parts_.at(2 * i); }
    /// Relationship sub-query between entities i and i+1, i.e. part 2i+1.
    const SubQuery& relationship(std::size_t i) const { return parts_.at(2 * i + 1); }

    /// All query terms in part order.
    Terms all_terms() const;

    friend bool operator==(const ERQuery&, const ERQuery&) = default;

  private:
    std::string id_;
    std::vector<SubQuery> parts_;
};

/// Parse "query_id<TAB>entity<TAB>relationship<TAB>entity[...]".
ERQuery parse_query(std::string_view line);
std::vector<ERQuery> load_queries(const std::filesystem::path& path);
std::string format_query(const ERQuery& query);

/// query id -> answer tuple arity, for qrels validation.
std::map<std::string, std::size_t> query_arities(const std::vector<ERQuery>& queries);

}  // namespace erdm
