#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "erdm/corpus.hpp"
#include "erdm/ranking.hpp"
#include "erdm/tuple.hpp"

namespace erdm {

// ---- run files -------------------------------------------------------------

struct RunEntry {
    EntityTuple tuple;
    std::size_t rank = 0;
    double score = 0.0;
};

/// query id -> entries sorted by rank.
using Run = std::map<std::string, std::vector<RunEntry>>;

/// "query_id<TAB>A|B[|C]<TAB>rank<TAB>score<TAB>run_tag", rank starting at 1.
void write_run(std::ostream& out, const std::string& query_id, const std::vector<ScoredTuple>& ranked,
               std::string_view run_tag);
Run parse_run(std::string_view content);
Run load_run(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

// ---- metrics ---------------------------------------------------------------

/// Canonical tuple -> relevance grade. Unjudged tuples are non-relevant.
using Judgments = std::map<EntityTuple, int>;
Judgments make_judgments(const std::vector<QrelRecord>& records);

/// (1/R) * sum of P@k over relevant ranks k <= cutoff; R counts every
/// relevant judgment, retrieved or not. nullopt when R = 0.
std::optional<double> average_precision(const std::vector<EntityTuple>& ranked, const Judgments& judgments,
                                        std::size_t cutoff = 100);
/// Relevant in the top k divided by k (the denominator stays k for short lists).
double precision_at(const std::vector<EntityTuple>& ranked, const Judgments& judgments, std::size_t k = 10);
double reciprocal_rank(const std::vector<EntityTuple>& ranked, const Judgments& judgments);
/// Gain 2^rel - 1, discount log2(i + 1). nullopt when the ideal DCG is 0.
std::optional<double> ndcg_at(const std::vector<EntityTuple>& ranked, const Judgments& judgments,
                              std::size_t k = 20);

struct QueryMetrics {
    std::string query_id;
    double map = 0.0;
    double p10 = 0.0;
    double mrr = 0.0;
    double ndcg20 = 0.0;
    std::size_t retrieved = 0;
    std::size_t relevant = 0;
    std::size_t relevant_retrieved = 0;
};

struct MetricReport {
    std::vector<QueryMetrics> per_query;  // evaluated queries, by id
    double map = 0.0;
    double p10 = 0.0;
    double mrr = 0.0;
    double ndcg20 = 0.0;
    /// Queries excluded from the means because no relevant tuple is judged.
    std::vector<std::string> flagged;

    std::size_t evaluated() const { return per_query.size(); }
};

QueryMetrics evaluate_query(const std::string& query_id, const std::vector<EntityTuple>& ranked,
                            const Judgments& judgments);

struct EvaluateOptions {
    /// Evaluate only queries that appear in the run. By default every qrels
    /// query is evaluated and a query absent from the run scores zero.
    bool run_queries_only = false;
};

/// Macro (unweighted) means over the evaluated queries.
MetricReport macro_average(std::vector<QueryMetrics> per_query, std::vector<std::string> flagged = {});
MetricReport evaluate(const Run& run, const Qrels& qrels, const EvaluateOptions& options = {});
MetricReport evaluate_run(const std::filesystem::path& run, const std::filesystem::path& qrels,
                          const EvaluateOptions& options = {});

/// TSV report: macro lines "metric<TAB>value", then per-query lines when requested.
std::string format_report(const MetricReport& report, bool per_query = false);

}  // namespace erdm
