#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace erdm {

using EntityId = std::string;

/// Undirected entity pair, stored with the lexicographically smaller id first.
struct EntityPair {
    EntityId first;
    EntityId second;

    static EntityPair normalized(EntityId a, EntityId b);
    /// Parse "A|B"; the result is normalized.
    static EntityPair from_key(std::string_view key);

    std::string key() const { return first + '|' + second; }
    bool contains(std::string_view id) const { return first == id || second == id; }

    friend auto operator<=>(const EntityPair&, const EntityPair&) = default;
};

/// Answer tuple in entity-slot order: arity 2 for |Q|=3, arity 3 for |Q|=5.
using EntityTuple = std::vector<EntityId>;

std::string tuple_key(const EntityTuple& tuple);
EntityTuple parse_tuple(std::string_view key);

/// Relationships are symmetric, so a chain and its reverse denote the same
/// answer. The canonical orientation is the lexicographically smaller one;
/// for pairs this is the sorted pair.
EntityTuple canonical_tuple(const EntityTuple& tuple);

/// True if `id` may appear in the line formats (non-empty, no '|', no
/// whitespace control characters).
bool valid_entity_id(std::string_view id);

}  // namespace erdm
