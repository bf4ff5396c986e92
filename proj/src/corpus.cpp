#include "erdm/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "erdm/error.hpp"
#include "erdm/text.hpp"

namespace erdm {

namespace {

using json = nlohmann::json;

bool blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](char c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n';
    });
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return in;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto tab = line.find('\t', pos);
        if (tab == std::string_view::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, tab - pos));
        pos = tab + 1;
    }
    return out;
}

}  // namespace

void validate_document(AnnotatedDocument& doc) {
    auto fail = [&](const std::string& what) {
        throw ValidationError("document '" + doc.doc_id + "': " + what);
    };
    if (doc.doc_id.empty()) {
        throw ValidationError("document with empty doc_id");
    }
    std::size_t length = utf8_decode(doc.text).size();
    std::stable_sort(doc.mentions.begin(), doc.mentions.end(),
                     [](const EntityMention& a, const EntityMention& b) { return a.start < b.start; });
    for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
        const auto& m = doc.mentions[i];
        if (!valid_entity_id(m.entity_id)) {
            fail("invalid entity id '" + m.entity_id + "'");
        }
        if (m.start >= m.end) {
            fail("mention of " + m.entity_id + " has start >= end");
        }
        if (m.end > length) {
            fail("mention of " + m.entity_id + " ends at " + std::to_string(m.end) +
                 " beyond text length " + std::to_string(length));
        }
        if (i > 0 && doc.mentions[i - 1].end > m.start) {
            fail("overlapping mentions at offsets " + std::to_string(doc.mentions[i - 1].start) + " and " +
                 std::to_string(m.start));
        }
    }
}

AnnotatedDocument parse_document(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    AnnotatedDocument doc;
    try {
        doc.doc_id = j.at("doc_id").get<std::string>();
        doc.text = j.at("text").get<std::string>();
        for (const auto& m : j.at("mentions")) {
            auto start = m.at("start").get<long long>();
            auto end = m.at("end").get<long long>();
            if (start < 0 || end < 0) {
                throw ParseError("negative mention offset");
            }
            doc.mentions.push_back(EntityMention{m.at("entity_id").get<std::string>(),
                                                 static_cast<std::size_t>(start),
                                                 static_cast<std::size_t>(end)});
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed document record: ") + e.what());
    }
    validate_document(doc);
    return doc;
}

std::string serialize_document(const AnnotatedDocument& doc) {
    json mentions = json::array();
    for (const auto& m : doc.mentions) {
        mentions.push_back(json{{"entity_id", m.entity_id}, {"start", m.start}, {"end", m.end}});
    }
    json j{{"doc_id", doc.doc_id}, {"text", doc.text}, {"mentions", std::move(mentions)}};
    return j.dump();
}

void for_each_document(const std::filesystem::path& path,
                       const std::function<void(AnnotatedDocument&&)>& fn) {
    auto in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) {
            continue;
        }
        AnnotatedDocument doc;
        try {
            doc = parse_document(line);
        } catch (const ValidationError& e) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        fn(std::move(doc));
    }
}

std::vector<AnnotatedDocument> load_corpus(const std::filesystem::path& path) {
    std::vector<AnnotatedDocument> docs;
    for_each_document(path, [&](AnnotatedDocument&& d) { docs.push_back(std::move(d)); });
    return docs;
}

void write_corpus(const std::filesystem::path& path, const std::vector<AnnotatedDocument>& docs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    for (const auto& d : docs) {
        out << serialize_document(d) << '\n';
    }
}

Qrels parse_qrels(std::string_view content, const std::optional<std::map<std::string, std::size_t>>& arities) {
    Qrels qrels;
    std::map<std::string, std::size_t> seen_arity;
    std::set<std::pair<std::string, std::string>> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        auto nl = content.find('\n', pos);
        auto line = content.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? content.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (blank(line)) {
            continue;
        }
        auto where = "qrels line " + std::to_string(line_no) + ": ";
        auto fields = split_tabs(line);
        if (fields.size() != 3) {
            throw ParseError(where + "expected 3 TAB-separated fields");
        }
        QrelRecord rec;
        rec.query_id = std::string(fields[0]);
        if (rec.query_id.empty()) {
            throw ParseError(where + "empty query id");
        }
        try {
            rec.tuple = canonical_tuple(parse_tuple(fields[1]));
            std::size_t used = 0;
            rec.relevance = std::stoi(std::string(fields[2]), &used);
            if (used != fields[2].size()) {
                throw ParseError("bad grade");
            }
        } catch (const ParseError& e) {
            throw ParseError(where + e.what());
        } catch (const std::exception&) {
            throw ParseError(where + "relevance grade is not an integer");
        }
        if (rec.relevance < 0) {
            throw ValidationError(where + "negative relevance grade");
        }
        if (rec.tuple.size() < 2) {
            throw ValidationError(where + "tuple needs at least two entities");
        }
        for (std::size_t i = 0; i < rec.tuple.size(); ++i) {
            if (!valid_entity_id(rec.tuple[i])) {
                throw ValidationError(where + "invalid entity id");
            }
        }
        auto [it, inserted] = seen_arity.emplace(rec.query_id, rec.tuple.size());
        if (!inserted && it->second != rec.tuple.size()) {
            throw ValidationError(where + "tuple arity differs from earlier records of " + rec.query_id);
        }
        if (arities) {
            auto expected = arities->find(rec.query_id);
            if (expected != arities->end() && expected->second != rec.tuple.size()) {
                throw ValidationError(where + "tuple arity " + std::to_string(rec.tuple.size()) +
                                      " does not match query " + rec.query_id + " (arity " +
                                      std::to_string(expected->second) + ")");
            }
        }
        if (!seen.emplace(rec.query_id, tuple_key(rec.tuple)).second) {
            throw ValidationError(where + "duplicate tuple " + tuple_key(rec.tuple) + " for " + rec.query_id);
        }
        qrels[rec.query_id].push_back(std::move(rec));
    }
    return qrels;
}

Qrels load_qrels(const std::filesystem::path& path, const std::optional<std::map<std::string, std::size_t>>& arities) {
    auto in = open_input(path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_qrels(buf.str(), arities);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_qrels(const std::filesystem::path& path, const Qrels& qrels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    for (const auto& [qid, records] : qrels) {
        for (const auto& r : records) {
            out << qid << '\t' << tuple_key(r.tuple) << '\t' << r.relevance << '\n';
        }
    }
}

std::size_t count_relevant(const std::vector<QrelRecord>& records) {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const QrelRecord& r) { return r.relevance > 0; }));
}

}  // namespace erdm
