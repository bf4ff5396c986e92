#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "erdm/index.hpp"
#include "erdm/query.hpp"
#include "erdm/scoring.hpp"
#include "erdm/tuple.hpp"

namespace erdm {

/// ERDM clique-set features, in weight-vector order.
enum class Feature : std::size_t { E_T, E_O, E_U, R_T, R_O, R_U, ER_S, RER_S };
inline constexpr std::size_t num_features = 8;
inline constexpr std::array<std::string_view, num_features> feature_names = {
    "E_T", "E_O", "E_U", "R_T", "R_O", "R_U", "ER_S", "RER_S"};

using FeatureVector = std::array<double, num_features>;

constexpr std::size_t idx(Feature f) { return static_cast<std::size_t>(f); }

double dot(const FeatureVector& weights, const FeatureVector& features);

/// Feature weights on the probability simplex (non-negative, sum 1).
class LambdaWeights {
  public:
    static constexpr double tolerance = 1e-9;

    /// Uniform weights.
    LambdaWeights();
    /// Throws ValidationError unless `values` is on the simplex within tolerance.
    explicit LambdaWeights(const FeatureVector& values);
    /// Scale non-negative values to sum 1. Throws if any is negative or all are zero.
    static LambdaWeights normalized(const FeatureVector& values);

    const FeatureVector& values() const { return values_; }
    double operator[](Feature f) const { return values_[idx(f)]; }

    /// JSON object feature name -> weight; missing names are zero.
    std::string to_json() const;
    static LambdaWeights from_json(std::string_view text);
    static LambdaWeights load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    friend bool operator==(const LambdaWeights&, const LambdaWeights&) = default;

  private:
    FeatureVector values_{};
};

struct ScoredTuple {
    EntityTuple tuple;
    double total = 0.0;
    FeatureVector features{};
};

/// First-stage results: one key list per entity sub-query and one pair list
/// per relationship sub-query.
struct CandidateSets {
    std::vector<std::vector<EntityId>> entities;
    std::vector<std::vector<EntityPair>> relationships;
};

CandidateSets retrieve_candidates(const ERQuery& query, const IndexSet& indexes, std::size_t k);

/// Tuples satisfying the factorized membership constraints, in lexicographic
/// order. |Q|=3: (e1,e2) with e1 in entities[0], e2 in entities[1] and
/// {e1,e2} in relationships[0]; both orientations of a pair are emitted when
/// both qualify. |Q|=5: (e1,e2,e3) with {e1,e2} in relationships[0] and
/// {e2,e3} in relationships[1] sharing e2, each e_i in entities[i], all distinct.
std::vector<EntityTuple> join_candidates(const ERQuery& query, const CandidateSets& candidates);

/// Early Fusion: sum of unigram retrieval scores of every entity and
/// relationship sub-query. Features E_T and R_T carry the two partial sums.
/// Returns nullopt when a meta-doc of the tuple is missing.
std::optional<ScoredTuple> score_ef(const EntityTuple& tuple, const ERQuery& query, const IndexSet& indexes,
                                    const ScoringParams& params, Retrieval retrieval);

/// ERDM features for one tuple; nullopt when a meta-doc is missing.
std::optional<FeatureVector> erdm_features(const EntityTuple& tuple, const ERQuery& query, const IndexSet& indexes,
                                           const ScoringParams& params, Retrieval retrieval);

std::optional<ScoredTuple> score_erdm(const EntityTuple& tuple, const ERQuery& query, const IndexSet& indexes,
                                      const ScoringParams& params, const FeatureVector& weights,
                                      Retrieval retrieval);
std::optional<ScoredTuple> score_erdm(const EntityTuple& tuple, const ERQuery& query, const IndexSet& indexes,
                                      const ScoringParams& params, const LambdaWeights& weights,
                                      Retrieval retrieval);

/// Collapse tuples that are orientations of the same answer, keeping the
/// highest total (lexicographically smaller orientation on ties). The kept
/// tuple is rewritten in canonical orientation.
std::vector<ScoredTuple> dedup_orientations(std::vector<ScoredTuple> scored);

/// Descending total, ties by tuple ascending, truncated at cutoff.
std::vector<ScoredTuple> rank(std::vector<ScoredTuple> scored, std::size_t cutoff = 100);

/// SDM weights used by the baselines (unigram, ordered, unordered).
inline constexpr std::array<double, 3> sdm_default_weights = {0.85, 0.10, 0.05};

/// LM-based SDM score of a single meta-doc.
double sdm_score(const Terms& terms, const MetaDoc& doc, const MetaDocIndex& index, const ScoringParams& params);

struct ScoredKey {
    std::string key;
    double score = 0.0;
};

/// First-stage match (depth k) re-scored with SDM, sorted by score then key.
std::vector<ScoredKey> sdm_ranking(const Terms& terms, const MetaDocIndex& index, const ScoringParams& params,
                                   std::size_t k);

/// Best `cutoff` unordered pairs (a, b), a != b, from the cross product of two
/// scored lists, scored by a.score + b.score. Exact; enumerates pairs lazily
/// in descending sum order.
std::vector<ScoredTuple> top_pair_sums(const std::vector<ScoredKey>& left, const std::vector<ScoredKey>& right,
                                       std::size_t cutoff);

/// BaseEE: two SDM queries (E1+R, R+E2) on the entity index, cross product.
std::vector<ScoredTuple> baseline_base_ee(const ERQuery& query, const MetaDocIndex& entity_index,
                                          const ScoringParams& params, std::size_t k, std::size_t cutoff = 100);
/// BaseE: one SDM query with all terms on the entity index, crossed with itself.
std::vector<ScoredTuple> baseline_base_e(const ERQuery& query, const MetaDocIndex& entity_index,
                                         const ScoringParams& params, std::size_t k, std::size_t cutoff = 100);
/// BaseR: one SDM query with all terms on the full-sentence pair index.
std::vector<ScoredTuple> baseline_base_r(const ERQuery& query, const MetaDocIndex& sentence_pair_index,
                                         const ScoringParams& params, std::size_t k, std::size_t cutoff = 100);

enum class Model { ef_lm, ef_bm25, erdm_lm, erdm_bm25, base_ee, base_e, base_r };

Model parse_model(std::string_view name);
std::string_view model_name(Model model);
bool is_erdm(Model model);

struct SearchOptions {
    std::size_t k = 20000;
    std::size_t cutoff = 100;
    ScoringParams params;
    LambdaWeights weights;
};

/// Full retrieval for one query: candidates, join, scoring, dedup and rank.
std::vector<ScoredTuple> search(const ERQuery& query, const IndexSet& indexes, Model model,
                                const SearchOptions& options);

/// Checks that the indexes can serve `params` (same window size).
void check_compatible(const IndexSet& indexes, const ScoringParams& params);

}  // namespace erdm
