#include "erdm/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "erdm/error.hpp"

namespace erdm {

namespace {

using json = nlohmann::json;

Count lookup_count(const CountMap& m, std::string_view key) {
    auto it = m.find(std::string(key));
    return it == m.end() ? 0 : it->second;
}

const char* kind_name(IndexKind kind) { return kind == IndexKind::entity ? "entity" : "relationship"; }

IndexKind parse_kind(const std::string& s) {
    if (s == "entity") {
        return IndexKind::entity;
    }
    if (s == "relationship") {
        return IndexKind::relationship;
    }
    throw ParseError("unknown index kind '" + s + "'");
}

void add_counts(CountMap& into, const CountMap& from) {
    for (const auto& [k, v] : from) {
        into[k] += v;
    }
}

void add_df(CountMap& into, const CountMap& from) {
    for (const auto& [k, v] : from) {
        if (v > 0) {
            ++into[k];
        }
    }
}

CountMap read_counts(const json& j) {
    CountMap m;
    for (auto it = j.begin(); it != j.end(); ++it) {
        m.emplace(it.key(), it.value().get<Count>());
    }
    return m;
}

}  // namespace

std::string ordered_key(std::string_view t1, std::string_view t2) {
    std::string k;
    k.reserve(t1.size() + t2.size() + 1);
    k.append(t1).push_back(' ');
    k.append(t2);
    return k;
}

std::string window_key(std::string_view t1, std::string_view t2) {
    return t2 < t1 ? ordered_key(t2, t1) : ordered_key(t1, t2);
}

Count MetaDoc::term(std::string_view t) const { return lookup_count(tf, t); }
Count MetaDoc::ordered(std::string_view t1, std::string_view t2) const {
    return lookup_count(tf_ordered, ordered_key(t1, t2));
}
Count MetaDoc::unordered(std::string_view t1, std::string_view t2) const {
    return lookup_count(tf_window, window_key(t1, t2));
}

Count CollectionStats::get(const CountMap& m, std::string_view key) { return lookup_count(m, key); }

MetaDocIndex MetaDocIndex::build(const std::vector<EntityExtraction>& extractions, const IndexOptions& options) {
    std::vector<Record> records;
    records.reserve(extractions.size());
    for (const auto& e : extractions) {
        records.push_back(Record{e.entity_id, &e.doc_id, &e.terms});
    }
    return build_from(std::move(records), IndexKind::entity, options);
}

MetaDocIndex MetaDocIndex::build(const std::vector<RelationshipExtraction>& extractions, const IndexOptions& options) {
    std::vector<Record> records;
    records.reserve(extractions.size());
    for (const auto& r : extractions) {
        if (r.pair.first == r.pair.second || r.pair.second < r.pair.first) {
            throw ValidationError("relationship extraction with non-normalized pair " + r.pair.key());
        }
        records.push_back(Record{r.pair.key(), &r.doc_id, &r.terms});
    }
    return build_from(std::move(records), IndexKind::relationship, options);
}

MetaDocIndex MetaDocIndex::build_from(std::vector<Record> records, IndexKind kind, const IndexOptions& options) {
    if (options.window < 2) {
        throw ValidationError("window must be at least 2");
    }
    std::sort(records.begin(), records.end(), [](const Record& a, const Record& b) {
        return std::tie(a.key, *a.doc_id, *a.terms) < std::tie(b.key, *b.doc_id, *b.terms);
    });

    MetaDocIndex index;
    index.kind_ = kind;
    index.options_ = options;
    const std::size_t span = options.window - 1;

    for (std::size_t i = 0; i < records.size();) {
        MetaDoc doc;
        doc.key = records[i].key;
        std::size_t j = i;
        for (; j < records.size() && records[j].key == doc.key; ++j) {
            if (options.max_extractions_per_key != 0 && doc.extractions >= options.max_extractions_per_key) {
                continue;
            }
            const Terms& terms = *records[j].terms;
            ++doc.extractions;
            doc.source_docs.insert(*records[j].doc_id);
            doc.length += terms.size();
            for (std::size_t p = 0; p < terms.size(); ++p) {
                ++doc.tf[terms[p]];
                if (p + 1 < terms.size()) {
                    ++doc.tf_ordered[ordered_key(terms[p], terms[p + 1])];
                }
                for (std::size_t q = p + 1; q < terms.size() && q - p <= span; ++q) {
                    ++doc.tf_window[window_key(terms[p], terms[q])];
                }
            }
        }
        index.docs_.push_back(std::move(doc));
        i = j;
    }
    index.finalize();
    return index;
}

void MetaDocIndex::finalize() {
    stats_ = CollectionStats{};
    by_key_.clear();
    postings_.clear();
    stats_.num_docs = docs_.size();
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        const auto& doc = docs_[i];
        stats_.total_terms += doc.length;
        add_counts(stats_.cf, doc.tf);
        add_counts(stats_.cf_ordered, doc.tf_ordered);
        add_counts(stats_.cf_window, doc.tf_window);
        add_df(stats_.df, doc.tf);
        add_df(stats_.df_ordered, doc.tf_ordered);
        add_df(stats_.df_window, doc.tf_window);
        if (kind_ == IndexKind::relationship) {
            auto pair = EntityPair::from_key(doc.key);
            ++stats_.entity_pair_membership[pair.first];
            ++stats_.entity_pair_membership[pair.second];
        }
        by_key_.emplace(doc.key, i);
        for (const auto& [term, count] : doc.tf) {
            if (count > 0) {
                postings_[term].push_back(static_cast<std::uint32_t>(i));
            }
        }
    }
}

const MetaDoc* MetaDocIndex::lookup(std::string_view key) const {
    auto it = by_key_.find(std::string(key));
    return it == by_key_.end() ? nullptr : &docs_[it->second];
}

const MetaDoc* MetaDocIndex::lookup_pair(std::string_view a, std::string_view b) const {
    return lookup(EntityPair::normalized(std::string(a), std::string(b)));
}

std::vector<Candidate> MetaDocIndex::match_candidates(const Terms& query_terms, std::size_t k) const {
    if (k == 0) {
        throw ValidationError("candidate depth k must be at least 1");
    }
    Terms distinct = query_terms;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::unordered_map<std::uint32_t, double> scores;
    const auto n = static_cast<double>(stats_.num_docs);
    for (const auto& term : distinct) {
        auto it = postings_.find(term);
        if (it == postings_.end()) {
            continue;
        }
        double idf = std::log(n / static_cast<double>(it->second.size()));
        for (auto doc : it->second) {
            scores[doc] += static_cast<double>(docs_[doc].term(term)) * idf;
        }
    }
    std::vector<Candidate> out;
    out.reserve(scores.size());
    for (const auto& [doc, score] : scores) {
        out.push_back(Candidate{&docs_[doc], score});
    }
    auto better = [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.doc->key < b.doc->key;
    };
    if (out.size() > k) {
        std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), out.end(), better);
        out.resize(k);
    } else {
        std::sort(out.begin(), out.end(), better);
    }
    return out;
}

void MetaDocIndex::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    json stats{{"kind", kind_name(kind_)},
               {"window", options_.window},
               {"max_extractions_per_key", options_.max_extractions_per_key},
               {"num_docs", stats_.num_docs},
               {"total_terms", stats_.total_terms},
               {"cf", stats_.cf},
               {"cf_ordered", stats_.cf_ordered},
               {"cf_window", stats_.cf_window},
               {"df", stats_.df},
               {"df_ordered", stats_.df_ordered},
               {"df_window", stats_.df_window},
               {"entity_pair_membership", stats_.entity_pair_membership}};
    {
        std::ofstream out(dir / "stats.json", std::ios::binary);
        if (!out) {
            throw Error("cannot write " + (dir / "stats.json").string());
        }
        out << stats.dump() << '\n';
    }
    std::ofstream out(dir / "metadocs.jsonl", std::ios::binary);
    if (!out) {
        throw Error("cannot write " + (dir / "metadocs.jsonl").string());
    }
    for (const auto& doc : docs_) {
        json j{{"key", doc.key},
               {"length", doc.length},
               {"extractions", doc.extractions},
               {"source_docs", doc.source_docs},
               {"tf", doc.tf},
               {"ordered", doc.tf_ordered},
               {"window", doc.tf_window}};
        out << j.dump() << '\n';
    }
}

MetaDocIndex MetaDocIndex::load(const std::filesystem::path& dir) {
    auto stats_path = dir / "stats.json";
    auto docs_path = dir / "metadocs.jsonl";
    std::ifstream stats_in(stats_path);
    if (!stats_in) {
        throw Error("cannot open " + stats_path.string());
    }
    std::ifstream docs_in(docs_path);
    if (!docs_in) {
        throw Error("cannot open " + docs_path.string());
    }
    MetaDocIndex index;
    try {
        json stats = json::parse(stats_in);
        index.kind_ = parse_kind(stats.at("kind").get<std::string>());
        index.options_.window = stats.at("window").get<unsigned>();
        index.options_.max_extractions_per_key = stats.at("max_extractions_per_key").get<std::size_t>();
        std::string line;
        while (std::getline(docs_in, line)) {
            if (line.empty()) {
                continue;
            }
            json j = json::parse(line);
            MetaDoc doc;
            doc.key = j.at("key").get<std::string>();
            doc.length = j.at("length").get<Count>();
            doc.extractions = j.at("extractions").get<Count>();
            doc.source_docs = j.at("source_docs").get<std::set<std::string>>();
            doc.tf = read_counts(j.at("tf"));
            doc.tf_ordered = read_counts(j.at("ordered"));
            doc.tf_window = read_counts(j.at("window"));
            index.docs_.push_back(std::move(doc));
        }
        index.finalize();
        CollectionStats stored;
        stored.num_docs = stats.at("num_docs").get<Count>();
        stored.total_terms = stats.at("total_terms").get<Count>();
        stored.cf = read_counts(stats.at("cf"));
        stored.cf_ordered = read_counts(stats.at("cf_ordered"));
        stored.cf_window = read_counts(stats.at("cf_window"));
        stored.df = read_counts(stats.at("df"));
        stored.df_ordered = read_counts(stats.at("df_ordered"));
        stored.df_window = read_counts(stats.at("df_window"));
        stored.entity_pair_membership = read_counts(stats.at("entity_pair_membership"));
        if (!(stored == index.stats_)) {
            throw ValidationError("stats file disagrees with meta-docs in " + dir.string());
        }
    } catch (const json::exception& e) {
        throw ParseError("corrupt index in " + dir.string() + ": " + e.what());
    }
    if (!std::is_sorted(index.docs_.begin(), index.docs_.end(),
                        [](const MetaDoc& a, const MetaDoc& b) { return a.key < b.key; })) {
        throw ValidationError("meta-docs not sorted by key in " + dir.string());
    }
    return index;
}

void IndexSet::save(const std::filesystem::path& dir) const {
    entities.save(dir / "entity");
    relationships.save(dir / "relationship");
    if (sentence_pairs) {
        sentence_pairs->save(dir / "sentence_pairs");
    }
}

IndexSet IndexSet::load(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw Error("index directory not found: " + dir.string());
    }
    IndexSet set;
    set.entities = MetaDocIndex::load(dir / "entity");
    set.relationships = MetaDocIndex::load(dir / "relationship");
    if (std::filesystem::exists(dir / "sentence_pairs")) {
        set.sentence_pairs = MetaDocIndex::load(dir / "sentence_pairs");
    }
    if (set.entities.kind() != IndexKind::entity || set.relationships.kind() != IndexKind::relationship) {
        throw ValidationError("index kinds do not match their directories in " + dir.string());
    }
    return set;
}

IndexSet build_index_set(const std::vector<AnnotatedDocument>& corpus, const IndexSetOptions& options) {
    std::vector<EntityExtraction> entities;
    std::vector<RelationshipExtraction> relationships;
    std::vector<RelationshipExtraction> sentences;
    for (const auto& doc : corpus) {
        auto e = extract_entities(doc);
        entities.insert(entities.end(), std::make_move_iterator(e.begin()), std::make_move_iterator(e.end()));
        auto r = extract_relationships(doc);
        relationships.insert(relationships.end(), std::make_move_iterator(r.begin()),
                             std::make_move_iterator(r.end()));
        if (options.sentence_pairs) {
            auto s = extract_relationships(doc, RelationshipContext::full_sentence);
            sentences.insert(sentences.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
        }
    }
    if (options.dump_extractions) {
        std::ofstream out(*options.dump_extractions, std::ios::binary);
        if (!out) {
            throw Error("cannot write " + options.dump_extractions->string());
        }
        for (const auto& e : entities) {
            out << entity_extraction_json(e) << '\n';
        }
        for (const auto& r : relationships) {
            out << relationship_extraction_json(r) << '\n';
        }
    }
    IndexSet set;
    set.entities = MetaDocIndex::build(entities, options.index);
    set.relationships = MetaDocIndex::build(relationships, options.index);
    if (options.sentence_pairs) {
        set.sentence_pairs = MetaDocIndex::build(sentences, options.index);
    }
    return set;
}

}  // namespace erdm
