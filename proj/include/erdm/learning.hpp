#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "erdm/corpus.hpp"
#include "erdm/evaluation.hpp"
#include "erdm/index.hpp"
#include "erdm/query.hpp"
#include "erdm/ranking.hpp"
#include "erdm/rng.hpp"

namespace erdm {

/// One answer candidate with the feature vectors of each orientation the
/// join produced; its score under weights w is the best orientation's w.f.
struct TrainingCandidate {
    EntityTuple tuple;  // canonical orientation
    std::vector<FeatureVector> orientations;
    int relevance = 0;
};

/// Cached features for one query. Candidates are sorted by tuple, which
/// fixes the tie-break order used when re-ranking.
struct TrainingInstance {
    std::string query_id;
    std::vector<TrainingCandidate> candidates;
    /// Relevant judgments for the query, including ones never retrieved.
    std::size_t total_relevant = 0;
    Judgments judgments;
};

/// Retrieve, join and featurize every query once.
std::vector<TrainingInstance> build_training_instances(const std::vector<ERQuery>& queries, const Qrels& qrels,
                                                       const IndexSet& indexes, const ScoringParams& params,
                                                       Retrieval retrieval, std::size_t k);

/// Candidate indices by descending score (ties keep tuple order), truncated.
std::vector<std::size_t> rank_instance(const TrainingInstance& instance, const FeatureVector& weights,
                                       std::size_t cutoff = 100);
/// AP@100 of the re-ranked instance; 0 when the query has no relevant judgment.
double instance_average_precision(const TrainingInstance& instance, const FeatureVector& weights);
/// Mean AP over the instances that have at least one relevant judgment.
double mean_average_precision(const std::vector<TrainingInstance>& instances, const FeatureVector& weights);
/// All four metrics of one re-ranked instance.
QueryMetrics evaluate_instance(const TrainingInstance& instance, const FeatureVector& weights);
std::vector<ScoredTuple> ranked_tuples(const TrainingInstance& instance, const FeatureVector& weights,
                                       std::size_t cutoff = 100);

struct AscentOptions {
    std::size_t restarts = 3;
    std::uint64_t seed = 0;
    std::size_t max_sweeps = 50;
    std::array<double, 6> multiplicative_steps = {0.05, 0.5, 0.9, 1.1, 2.0, 20.0};
    double additive_step = 0.05;
    /// Restarts run on up to this many threads; the result does not depend on it.
    std::size_t threads = 1;
};

struct AscentResult {
    LambdaWeights weights;
    double train_map = 0.0;
    /// Training MAP of the winning restart: initial value, then one entry per accepted step.
    std::vector<double> trace;
    std::vector<double> restart_maps;
    /// Features that varied in the training data; the rest keep weight 0.
    std::array<bool, num_features> active{};
};

/// Coordinate ascent on the simplex maximizing training MAP. Throws Error
/// when no instance has a relevant candidate.
AscentResult coordinate_ascent(const std::vector<TrainingInstance>& instances, const AscentOptions& options = {});

struct FoldAssignment {
    std::size_t folds = 0;
    std::map<std::string, std::size_t> fold_of;
    std::vector<std::vector<std::string>> test_queries;
};

/// Sort the ids, shuffle with the seed, deal round-robin into folds.
FoldAssignment assign_folds(std::vector<std::string> query_ids, std::size_t folds, std::uint64_t seed);

struct FoldResult {
    std::size_t fold = 0;
    LambdaWeights weights;
    double train_map = 0.0;
    MetricReport test;
};

struct CrossValidationResult {
    FoldAssignment assignment;
    std::vector<FoldResult> folds;
    /// Means over folds of the per-fold macro averages.
    double map = 0.0;
    double p10 = 0.0;
    double mrr = 0.0;
    double ndcg20 = 0.0;
};

CrossValidationResult cross_validate(const std::vector<TrainingInstance>& instances, std::size_t folds,
                                     std::uint64_t seed, AscentOptions options = {});

/// Same fold protocol for an unsupervised ranking given as per-query metrics.
CrossValidationResult fold_average(const std::vector<QueryMetrics>& per_query, const FoldAssignment& assignment);

}  // namespace erdm
