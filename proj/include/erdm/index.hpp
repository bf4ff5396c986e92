#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "erdm/corpus.hpp"
#include "erdm/extraction.hpp"
#include "erdm/text.hpp"
#include "erdm/tuple.hpp"

namespace erdm {

using Count = std::uint64_t;
using CountMap = std::map<std::string, Count>;

/// Key of an exact adjacent occurrence "t1 t2" (order matters).
std::string ordered_key(std::string_view t1, std::string_view t2);
/// Key of an unordered co-occurrence; the two terms are sorted.
std::string window_key(std::string_view t1, std::string_view t2);

/// Fused term statistics for one entity or one undirected entity pair.
struct MetaDoc {
    std::string key;          // entity id, or "A|B" with A < B
    CountMap tf;              // pseudo-frequency under binary document weights
    CountMap tf_ordered;      // #1 counts
    CountMap tf_window;       // #uwN counts
    Count length = 0;         // sum of tf
    Count extractions = 0;    // number of fused extractions
    std::set<std::string> source_docs;

    Count term(std::string_view t) const;
    Count ordered(std::string_view t1, std::string_view t2) const;
    Count unordered(std::string_view t1, std::string_view t2) const;

    friend bool operator==(const MetaDoc&, const MetaDoc&) = default;
};

struct CollectionStats {
    Count total_terms = 0;
    Count num_docs = 0;
    CountMap cf, cf_ordered, cf_window;
    CountMap df, df_ordered, df_window;
    /// n(E): number of relationship meta-docs containing each entity.
    /// Empty for the entity index.
    CountMap entity_pair_membership;

    double avg_len() const {
        return num_docs == 0 ? 0.0 : static_cast<double>(total_terms) / static_cast<double>(num_docs);
    }
    static Count get(const CountMap& m, std::string_view key);

    friend bool operator==(const CollectionStats&, const CollectionStats&) = default;
};

enum class IndexKind { entity, relationship };

struct IndexOptions {
    /// Unordered window size N: two positions co-occur when they differ by at most N-1.
    unsigned window = 8;
    /// Cap on extractions fused per meta-doc; 0 means uncapped. When capped,
    /// the kept extractions are the first ones in (doc_id, terms) order.
    std::size_t max_extractions_per_key = 0;

    friend bool operator==(const IndexOptions&, const IndexOptions&) = default;
};

struct Candidate {
    const MetaDoc* doc = nullptr;
    double score = 0.0;
};

/// An immutable early-fusion index: meta-docs sorted by key plus collection
/// statistics and a term -> meta-doc posting list for first-stage matching.
class MetaDocIndex {
  public:
    MetaDocIndex() = default;

    static MetaDocIndex build(const std::vector<EntityExtraction>& extractions, const IndexOptions& options = {});
    static MetaDocIndex build(const std::vector<RelationshipExtraction>& extractions,
                              const IndexOptions& options = {});

    IndexKind kind() const { return kind_; }
    const IndexOptions& options() const { return options_; }
    const CollectionStats& stats() const { return stats_; }
    const std::vector<MetaDoc>& docs() const { return docs_; }
    std::size_t size() const { return docs_.size(); }

    /// Exact key lookup; nullptr when absent.
    const MetaDoc* lookup(std::string_view key) const;
    /// Pair lookup in either orientation.
    const MetaDoc* lookup(const EntityPair& pair) const { return lookup(pair.key()); }
    const MetaDoc* lookup_pair(std::string_view a, std::string_view b) const;

    /// Disjunctive first-stage retrieval: every meta-doc containing at least
    /// one distinct query term, scored by sum of tf * log(N / df) over the
    /// matching terms, sorted by score descending then key ascending, and
    /// truncated to k. Throws if k == 0.
    std::vector<Candidate> match_candidates(const Terms& query_terms, std::size_t k) const;

    void save(const std::filesystem::path& dir) const;
    static MetaDocIndex load(const std::filesystem::path& dir);

    friend bool operator==(const MetaDocIndex& a, const MetaDocIndex& b) {
        return a.kind_ == b.kind_ && a.options_ == b.options_ && a.docs_ == b.docs_ && a.stats_ == b.stats_;
    }

  private:
    struct Record {
        std::string key;
        const std::string* doc_id;
        const Terms* terms;
    };

    static MetaDocIndex build_from(std::vector<Record> records, IndexKind kind, const IndexOptions& options);
    void finalize();

    IndexKind kind_ = IndexKind::entity;
    IndexOptions options_;
    std::vector<MetaDoc> docs_;
    CollectionStats stats_;
    std::unordered_map<std::string, std::size_t> by_key_;
    std::unordered_map<std::string, std::vector<std::uint32_t>> postings_;
};

/// The indexes built from one corpus: entity index, relationship index and,
/// optionally, the full-sentence pair index used by the BaseR baseline.
struct IndexSet {
    MetaDocIndex entities;
    MetaDocIndex relationships;
    std::optional<MetaDocIndex> sentence_pairs;

    void save(const std::filesystem::path& dir) const;
    static IndexSet load(const std::filesystem::path& dir);
};

struct IndexSetOptions {
    IndexOptions index;
    bool sentence_pairs = false;
    /// When set, every extraction is written here as one JSON line.
    std::optional<std::filesystem::path> dump_extractions;
};

IndexSet build_index_set(const std::vector<AnnotatedDocument>& corpus, const IndexSetOptions& options = {});

}  // namespace erdm
