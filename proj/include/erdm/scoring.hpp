#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "erdm/index.hpp"
#include "erdm/text.hpp"
#include "erdm/tuple.hpp"

namespace erdm {

/// Numerator used when a term is unseen in both the meta-doc and the collection.
inline constexpr double lm_floor_epsilon = 1e-10;

struct ScoringParams {
    /// Dirichlet priors; unset means "average meta-doc length of the index".
    std::optional<double> mu_entity;
    std::optional<double> mu_relationship;
    double k1 = 1.2;
    double b = 0.75;
    /// Jelinek-Mercer weight of the popularity background in f_er_s.
    double alpha = 0.1;
    unsigned window = 8;

    /// Throws ValidationError when a field is out of range.
    void validate() const;

    /// The prior used for `index`: the explicit override for its kind, else
    /// its average meta-doc length (1.0 for an index with no terms).
    double mu_for(const MetaDocIndex& index) const;

    static ScoringParams from_json(std::string_view text);
    static ScoringParams load(const std::filesystem::path& path);
    std::string to_json() const;
};

enum class Retrieval { lm, bm25 };

/// log[(tf + mu * cf / |C|) / (|D| + mu)], with the numerator replaced by
/// lm_floor_epsilon when it is zero.
double dirichlet_log(Count tf, Count doc_len, Count cf, Count collection_len, double mu);

/// BM25 term weight; the idf factor is floored at zero and tf = 0 scores 0.
double bm25_weight(Count tf, Count df, Count num_docs, Count doc_len, double avg_len, double k1, double b);

double lm_unigram(std::string_view term, const MetaDoc& doc, const CollectionStats& stats, double mu);
double lm_ordered(std::string_view t1, std::string_view t2, const MetaDoc& doc, const CollectionStats& stats,
                  double mu);
double lm_unordered(std::string_view t1, std::string_view t2, const MetaDoc& doc, const CollectionStats& stats,
                    double mu);

double bm25_unigram(std::string_view term, const MetaDoc& doc, const CollectionStats& stats, double k1, double b);
double bm25_ordered(std::string_view t1, std::string_view t2, const MetaDoc& doc, const CollectionStats& stats,
                    double k1, double b);
double bm25_unordered(std::string_view t1, std::string_view t2, const MetaDoc& doc, const CollectionStats& stats,
                      double k1, double b);

/// Entity/relationship compatibility, smoothed with entity popularity n(E)/N^R.
double f_er_s(std::string_view entity, const EntityPair& pair, const CollectionStats& relationship_stats,
              double alpha);

/// 1 iff the entity belongs to both consecutive pairs.
double f_rer_s(std::string_view entity, const EntityPair& left, const EntityPair& right);

/// Sub-query level sums of the three SDM-style feature functions. Bigrams are
/// consecutive terms of `terms`; a single-term query has zero bigram sums.
struct TextFeatures {
    double unigram = 0.0;
    double ordered = 0.0;
    double unordered = 0.0;
};

TextFeatures text_features(Retrieval retrieval, const Terms& terms, const MetaDoc& doc, const MetaDocIndex& index,
                           const ScoringParams& params);

/// Unigram-only sum (the Early Fusion retrieval score).
double unigram_score(Retrieval retrieval, const Terms& terms, const MetaDoc& doc, const MetaDocIndex& index,
                     const ScoringParams& params);

}  // namespace erdm
