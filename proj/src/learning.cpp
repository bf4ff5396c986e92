#include "erdm/learning.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <set>

#include "erdm/error.hpp"

namespace erdm {

std::vector<TrainingInstance> build_training_instances(const std::vector<ERQuery>& queries, const Qrels& qrels,
                                                       const IndexSet& indexes, const ScoringParams& params,
                                                       Retrieval retrieval, std::size_t k) {
    std::vector<TrainingInstance> out;
    out.reserve(queries.size());
    for (const auto& query : queries) {
        TrainingInstance inst;
        inst.query_id = query.id();
        if (auto q = qrels.find(query.id()); q != qrels.end()) {
            inst.judgments = make_judgments(q->second);
            inst.total_relevant = count_relevant(q->second);
        }
        std::map<EntityTuple, TrainingCandidate> grouped;
        for (const auto& tuple : join_candidates(query, retrieve_candidates(query, indexes, k))) {
            auto f = erdm_features(tuple, query, indexes, params, retrieval);
            if (!f) {
                continue;
            }
            auto canonical = canonical_tuple(tuple);
            auto& cand = grouped[canonical];
            cand.tuple = canonical;
            cand.orientations.push_back(*f);
        }
        for (auto& [tuple, cand] : grouped) {
            auto j = inst.judgments.find(tuple);
            cand.relevance = j == inst.judgments.end() ? 0 : j->second;
            inst.candidates.push_back(std::move(cand));
        }
        out.push_back(std::move(inst));
    }
    return out;
}

namespace {

double candidate_score(const TrainingCandidate& c, const FeatureVector& weights) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& f : c.orientations) {
        best = std::max(best, dot(weights, f));
    }
    return best;
}

}  // namespace

std::vector<std::size_t> rank_instance(const TrainingInstance& instance, const FeatureVector& weights,
                                       std::size_t cutoff) {
    std::vector<double> scores(instance.candidates.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i] = candidate_score(instance.candidates[i], weights);
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto better = [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) {
            return scores[a] > scores[b];
        }
        return a < b;
    };
    if (order.size() > cutoff) {
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cutoff), order.end(), better);
        order.resize(cutoff);
    } else {
        std::sort(order.begin(), order.end(), better);
    }
    return order;
}

double instance_average_precision(const TrainingInstance& instance, const FeatureVector& weights) {
    if (instance.total_relevant == 0) {
        return 0.0;
    }
    double sum = 0.0;
    std::size_t hits = 0;
    auto order = rank_instance(instance, weights, 100);
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (instance.candidates[order[i]].relevance > 0) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(instance.total_relevant);
}

double mean_average_precision(const std::vector<TrainingInstance>& instances, const FeatureVector& weights) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& inst : instances) {
        if (inst.total_relevant == 0) {
            continue;
        }
        sum += instance_average_precision(inst, weights);
        ++n;
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

std::vector<ScoredTuple> ranked_tuples(const TrainingInstance& instance, const FeatureVector& weights,
                                       std::size_t cutoff) {
    std::vector<ScoredTuple> out;
    for (auto i : rank_instance(instance, weights, cutoff)) {
        const auto& c = instance.candidates[i];
        ScoredTuple s{c.tuple, -std::numeric_limits<double>::infinity(), {}};
        for (const auto& f : c.orientations) {
            double v = dot(weights, f);
            if (v > s.total) {
                s.total = v;
                s.features = f;
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

QueryMetrics evaluate_instance(const TrainingInstance& instance, const FeatureVector& weights) {
    std::vector<EntityTuple> ranked;
    for (auto i : rank_instance(instance, weights, 100)) {
        ranked.push_back(instance.candidates[i].tuple);
    }
    return evaluate_query(instance.query_id, ranked, instance.judgments);
}

namespace {

FeatureVector normalize(FeatureVector v) {
    double sum = std::accumulate(v.begin(), v.end(), 0.0);
    for (auto& x : v) {
        x /= sum;
    }
    return v;
}

struct RestartOutcome {
    FeatureVector weights{};
    double map = 0.0;
    std::vector<double> trace;
};

RestartOutcome ascend(const std::vector<TrainingInstance>& instances, FeatureVector start,
                      const std::array<bool, num_features>& active, const AscentOptions& options) {
    RestartOutcome out;
    out.weights = start;
    out.map = mean_average_precision(instances, out.weights);
    out.trace.push_back(out.map);
    for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
        bool improved = false;
        for (std::size_t c = 0; c < num_features; ++c) {
            if (!active[c]) {
                continue;
            }
            std::vector<double> proposals;
            if (out.weights[c] > 0.0) {
                for (double s : options.multiplicative_steps) {
                    proposals.push_back(out.weights[c] * s);
                }
            }
            proposals.push_back(out.weights[c] + options.additive_step);

            std::optional<FeatureVector> best;
            double best_map = out.map;
            for (double value : proposals) {
                FeatureVector trial = out.weights;
                trial[c] = value;
                trial = normalize(trial);
                double m = mean_average_precision(instances, trial);
                if (m > best_map) {
                    best_map = m;
                    best = trial;
                }
            }
            if (best) {
                out.weights = *best;
                out.map = best_map;
                out.trace.push_back(out.map);
                improved = true;
            }
        }
        if (!improved) {
            break;
        }
    }
    return out;
}

}  // namespace

AscentResult coordinate_ascent(const std::vector<TrainingInstance>& instances, const AscentOptions& options) {
    bool any_relevant = std::any_of(instances.begin(), instances.end(), [](const TrainingInstance& inst) {
        return std::any_of(inst.candidates.begin(), inst.candidates.end(),
                           [](const TrainingCandidate& c) { return c.relevance > 0; });
    });
    if (!any_relevant) {
        throw Error("coordinate ascent needs at least one relevant candidate; MAP is undefined");
    }
    if (options.restarts == 0) {
        throw ValidationError("coordinate ascent needs at least one restart");
    }

    AscentResult result;
    // Features that never vary cannot change any ranking.
    std::array<bool, num_features> active{};
    const FeatureVector* reference = nullptr;
    for (const auto& inst : instances) {
        for (const auto& c : inst.candidates) {
            for (const auto& f : c.orientations) {
                if (reference == nullptr) {
                    reference = &f;
                    continue;
                }
                for (std::size_t i = 0; i < num_features; ++i) {
                    if (f[i] != (*reference)[i]) {
                        active[i] = true;
                    }
                }
            }
        }
    }
    result.active = active;
    std::size_t num_active = static_cast<std::size_t>(std::count(active.begin(), active.end(), true));

    std::vector<FeatureVector> starts;
    SeededRng rng(options.seed);
    if (num_active == 0) {
        starts.push_back(LambdaWeights().values());
    } else {
        FeatureVector uniform{};
        for (std::size_t i = 0; i < num_features; ++i) {
            uniform[i] = active[i] ? 1.0 / static_cast<double>(num_active) : 0.0;
        }
        starts.push_back(uniform);
        for (std::size_t r = 1; r < options.restarts; ++r) {
            starts.push_back(rng.dirichlet_ones(active));
        }
    }

    std::vector<RestartOutcome> outcomes(starts.size());
    if (options.threads > 1 && starts.size() > 1) {
        std::vector<std::future<RestartOutcome>> futures;
        for (const auto& s : starts) {
            futures.push_back(std::async(std::launch::async, ascend, std::cref(instances), s, active, options));
        }
        for (std::size_t i = 0; i < futures.size(); ++i) {
            outcomes[i] = futures[i].get();
        }
    } else {
        for (std::size_t i = 0; i < starts.size(); ++i) {
            outcomes[i] = ascend(instances, starts[i], active, options);
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        result.restart_maps.push_back(outcomes[i].map);
        if (outcomes[i].map > outcomes[best].map) {
            best = i;
        }
    }
    result.weights = LambdaWeights::normalized(outcomes[best].weights);
    result.train_map = outcomes[best].map;
    result.trace = outcomes[best].trace;
    return result;
}

FoldAssignment assign_folds(std::vector<std::string> query_ids, std::size_t folds, std::uint64_t seed) {
    if (folds == 0) {
        throw ValidationError("need at least one fold");
    }
    std::sort(query_ids.begin(), query_ids.end());
    query_ids.erase(std::unique(query_ids.begin(), query_ids.end()), query_ids.end());
    if (folds > query_ids.size()) {
        throw ValidationError("cannot make " + std::to_string(folds) + " folds from " +
                              std::to_string(query_ids.size()) + " queries");
    }
    SeededRng rng(seed);
    rng.shuffle(query_ids);
    FoldAssignment out;
    out.folds = folds;
    out.test_queries.resize(folds);
    for (std::size_t i = 0; i < query_ids.size(); ++i) {
        out.fold_of[query_ids[i]] = i % folds;
        out.test_queries[i % folds].push_back(query_ids[i]);
    }
    for (auto& q : out.test_queries) {
        std::sort(q.begin(), q.end());
    }
    return out;
}

CrossValidationResult cross_validate(const std::vector<TrainingInstance>& instances, std::size_t folds,
                                     std::uint64_t seed, AscentOptions options) {
    std::vector<std::string> ids;
    for (const auto& inst : instances) {
        ids.push_back(inst.query_id);
    }
    CrossValidationResult cv;
    cv.assignment = assign_folds(ids, folds, seed);
    options.seed = seed;
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<TrainingInstance> train;
        std::vector<const TrainingInstance*> test;
        for (const auto& inst : instances) {
            if (cv.assignment.fold_of.at(inst.query_id) == f) {
                test.push_back(&inst);
            } else {
                train.push_back(inst);
            }
        }
        auto learned = coordinate_ascent(train, options);
        std::vector<QueryMetrics> per_query;
        std::vector<std::string> flagged;
        for (const auto* inst : test) {
            if (inst->total_relevant == 0) {
                flagged.push_back(inst->query_id);
                continue;
            }
            per_query.push_back(evaluate_instance(*inst, learned.weights.values()));
        }
        cv.folds.push_back(FoldResult{f, learned.weights, learned.train_map,
                                      macro_average(std::move(per_query), std::move(flagged))});
    }
    for (const auto& fr : cv.folds) {
        cv.map += fr.test.map;
        cv.p10 += fr.test.p10;
        cv.mrr += fr.test.mrr;
        cv.ndcg20 += fr.test.ndcg20;
    }
    const auto n = static_cast<double>(cv.folds.size());
    cv.map /= n;
    cv.p10 /= n;
    cv.mrr /= n;
    cv.ndcg20 /= n;
    return cv;
}

CrossValidationResult fold_average(const std::vector<QueryMetrics>& per_query, const FoldAssignment& assignment) {
    CrossValidationResult cv;
    cv.assignment = assignment;
    std::vector<std::vector<QueryMetrics>> grouped(assignment.folds);
    for (const auto& m : per_query) {
        auto it = assignment.fold_of.find(m.query_id);
        if (it != assignment.fold_of.end()) {
            grouped[it->second].push_back(m);
        }
    }
    for (std::size_t f = 0; f < assignment.folds; ++f) {
        auto report = macro_average(grouped[f]);
        cv.map += report.map;
        cv.p10 += report.p10;
        cv.mrr += report.mrr;
        cv.ndcg20 += report.ndcg20;
        cv.folds.push_back(FoldResult{f, LambdaWeights(), 0.0, std::move(report)});
    }
    const auto n = static_cast<double>(assignment.folds);
    cv.map /= n;
    cv.p10 /= n;
    cv.mrr /= n;
    cv.ndcg20 /= n;
    return cv;
}

}  // namespace erdm
