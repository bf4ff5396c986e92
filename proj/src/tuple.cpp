#include "erdm/tuple.hpp"

#include <algorithm>

#include "erdm/error.hpp"

namespace erdm {

EntityPair EntityPair::normalized(EntityId a, EntityId b) {
    if (b < a) {
        std::swap(a, b);
    }
    return EntityPair{std::move(a), std::move(b)};
}

EntityPair EntityPair::from_key(std::string_view key) {
    auto parts = parse_tuple(key);
    if (parts.size() != 2) {
        throw ParseError("expected an entity pair 'A|B', got '" + std::string(key) + "'");
    }
    if (parts[0] == parts[1]) {
        throw ParseError("entity pair '" + std::string(key) + "' repeats one entity");
    }
    return normalized(std::move(parts[0]), std::move(parts[1]));
}

std::string tuple_key(const EntityTuple& tuple) {
    std::string out;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        if (i > 0) {
            out.push_back('|');
        }
        out += tuple[i];
    }
    return out;
}

EntityTuple parse_tuple(std::string_view key) {
    EntityTuple out;
    std::size_t pos = 0;
    while (true) {
        auto bar = key.find('|', pos);
        auto part = key.substr(pos, bar == std::string_view::npos ? std::string_view::npos : bar - pos);
        if (part.empty()) {
            throw ParseError("empty entity id in tuple '" + std::string(key) + "'");
        }
        out.emplace_back(part);
        if (bar == std::string_view::npos) {
            break;
        }
        pos = bar + 1;
    }
    return out;
}

EntityTuple canonical_tuple(const EntityTuple& tuple) {
    EntityTuple reversed(tuple.rbegin(), tuple.rend());
    return std::min(tuple, reversed);
}

bool valid_entity_id(std::string_view id) {
    if (id.empty()) {
        return false;
    }
    return std::none_of(id.begin(), id.end(), [](char c) {
        return c == '|' || c == '\t' || c == '\n' || c == '\r';
    });
}

}  // namespace erdm
