#include "erdm/query.hpp"

#include <fstream>
#include <set>

#include "erdm/error.hpp"

namespace erdm {

ERQuery::ERQuery(std::string id, std::vector<SubQuery> parts) : id_(std::move(id)), parts_(std::move(parts)) {
    if (id_.empty()) {
        throw ValidationError("query with empty id");
    }
    auto where = "query " + id_ + ": ";
    if (parts_.size() % 2 == 0) {
        throw ValidationError(where + "even number of parts (" + std::to_string(parts_.size()) +
                              "); a chain must start and end with an entity");
    }
    if (parts_.size() < 3) {
        throw ValidationError(where + "needs at least 3 parts");
    }
    if (parts_.size() > max_parts) {
        throw ValidationError(where + "chains longer than " + std::to_string(max_parts) + " parts are not supported");
    }
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        auto expected = i % 2 == 0 ? PartKind::entity : PartKind::relationship;
        if (parts_[i].kind != expected) {
            throw ValidationError(where + "parts do not alternate entity/relationship");
        }
        if (parts_[i].terms.empty()) {
            throw ValidationError(where + "part " + std::to_string(i + 1) + " has no terms");
        }
    }
}

Terms ERQuery::all_terms() const {
    Terms out;
    for (const auto& p : parts_) {
        out.insert(out.end(), p.terms.begin(), p.terms.end());
    }
    return out;
}

ERQuery parse_query(std::string_view line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
        line.remove_suffix(1);
    }
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        auto tab = line.find('\t', pos);
        fields.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
        if (tab == std::string_view::npos) {
            break;
        }
        pos = tab + 1;
    }
    if (fields.size() < 2) {
        throw ParseError("query line has no sub-queries");
    }
    std::vector<SubQuery> parts;
    for (std::size_t i = 1; i < fields.size(); ++i) {
        SubQuery part;
        part.kind = (i - 1) % 2 == 0 ? PartKind::entity : PartKind::relationship;
        part.text = std::string(fields[i]);
        part.terms = tokenize(fields[i]);
        parts.push_back(std::move(part));
    }
    return ERQuery(std::string(fields[0]), std::move(parts));
}

std::vector<ERQuery> load_queries(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::vector<ERQuery> out;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            out.push_back(parse_query(line));
        } catch (const Error& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (!ids.insert(out.back().id()).second) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": duplicate query id " +
                                  out.back().id());
        }
    }
    return out;
}

std::string format_query(const ERQuery& query) {
    std::string out = query.id();
    for (const auto& p : query.parts()) {
        out.push_back('\t');
        out += p.text;
    }
    return out;
}

std::map<std::string, std::size_t> query_arities(const std::vector<ERQuery>& queries) {
    std::map<std::string, std::size_t> out;
    for (const auto& q : queries) {
        out.emplace(q.id(), q.arity());
    }
    return out;
}

}  // namespace erdm
