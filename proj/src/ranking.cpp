#include "erdm/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "erdm/error.hpp"

namespace erdm {

double dot(const FeatureVector& weights, const FeatureVector& features) {
    double total = 0.0;
    for (std::size_t i = 0; i < num_features; ++i) {
        total += weights[i] * features[i];
    }
    return total;
}

LambdaWeights::LambdaWeights() { values_.fill(1.0 / static_cast<double>(num_features)); }

LambdaWeights::LambdaWeights(const FeatureVector& values) : values_(values) {
    double sum = 0.0;
    for (double v : values_) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ValidationError("lambda weights must be finite and non-negative");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance) {
        throw ValidationError("lambda weights must sum to 1");
    }
}

LambdaWeights LambdaWeights::normalized(const FeatureVector& values) {
    double sum = 0.0;
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ValidationError("lambda weights must be finite and non-negative");
        }
        sum += v;
    }
    if (!(sum > 0.0)) {
        throw ValidationError("lambda weights are all zero");
    }
    FeatureVector out{};
    for (std::size_t i = 0; i < num_features; ++i) {
        out[i] = values[i] / sum;
    }
    return LambdaWeights(out);
}

std::string LambdaWeights::to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < num_features; ++i) {
        j[std::string(feature_names[i])] = values_[i];
    }
    return j.dump(2);
}

LambdaWeights LambdaWeights::from_json(std::string_view text) {
    FeatureVector values{};
    try {
        auto j = nlohmann::json::parse(text);
        if (!j.is_object()) {
            throw ParseError("weights must be a JSON object");
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            auto pos = std::find(feature_names.begin(), feature_names.end(), it.key());
            if (pos == feature_names.end()) {
                throw ParseError("unknown feature '" + it.key() + "' in weights");
            }
            values[static_cast<std::size_t>(pos - feature_names.begin())] = it.value().get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid weights JSON: ") + e.what());
    }
    return LambdaWeights(values);
}

LambdaWeights LambdaWeights::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

void LambdaWeights::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << to_json() << '\n';
}

CandidateSets retrieve_candidates(const ERQuery& query, const IndexSet& indexes, std::size_t k) {
    CandidateSets out;
    for (std::size_t i = 0; i < query.arity(); ++i) {
        std::vector<EntityId> keys;
        for (const auto& c : indexes.entities.match_candidates(query.entity(i).terms, k)) {
            keys.push_back(c.doc->key);
        }
        out.entities.push_back(std::move(keys));
    }
    for (std::size_t i = 0; i < query.num_relationships(); ++i) {
        std::vector<EntityPair> pairs;
        for (const auto& c : indexes.relationships.match_candidates(query.relationship(i).terms, k)) {
            pairs.push_back(EntityPair::from_key(c.doc->key));
        }
        out.relationships.push_back(std::move(pairs));
    }
    return out;
}

std::vector<EntityTuple> join_candidates(const ERQuery& query, const CandidateSets& candidates) {
    if (candidates.entities.size() != query.arity() ||
        candidates.relationships.size() != query.num_relationships()) {
        throw ValidationError("candidate sets do not match the shape of query " + query.id());
    }
    std::vector<std::unordered_set<std::string>> members;
    for (const auto& list : candidates.entities) {
        members.emplace_back(list.begin(), list.end());
    }
    auto in = [&](std::size_t slot, const std::string& e) { return members[slot].count(e) > 0; };

    std::set<EntityTuple> out;
    if (query.arity() == 2) {
        for (const auto& p : candidates.relationships[0]) {
            if (in(0, p.first) && in(1, p.second)) {
                out.insert({p.first, p.second});
            }
            if (in(0, p.second) && in(1, p.first)) {
                out.insert({p.second, p.first});
            }
        }
    } else {
        std::unordered_map<std::string, std::set<std::string>> partners;
        for (const auto& p : candidates.relationships[1]) {
            partners[p.first].insert(p.second);
            partners[p.second].insert(p.first);
        }
        for (const auto& p : candidates.relationships[0]) {
            for (const auto& [a, b] : {std::pair{p.first, p.second}, std::pair{p.second, p.first}}) {
                if (!in(0, a) || !in(1, b)) {
                    continue;
                }
                auto it = partners.find(b);
                if (it == partners.end()) {
                    continue;
                }
                for (const auto& c : it->second) {
                    if (c != a && in(2, c)) {
                        out.insert({a, b, c});
                    }
                }
            }
        }
    }
    return {out.begin(), out.end()};
}

namespace {

void check_tuple(const EntityTuple& tuple, const ERQuery& query) {
    if (tuple.size() != query.arity()) {
        throw ValidationError("tuple arity does not match query " + query.id());
    }
}

}  // namespace

std::optional<ScoredTuple> score_ef(const EntityTuple& tuple, const ERQuery& query, const IndexSet& indexes,
                                    const ScoringParams& params, Retrieval retrieval) {
    check_tuple(tuple, query);
    ScoredTuple out;
    out.tuple = tuple;
    for (std::size_t i = 0; i < query.arity(); ++i) {
        const auto* doc = indexes.entities.lookup(tuple[i]);
        if (doc == nullptr) {
            return std::nullopt;
        }
        out.features[idx(Feature::E_T)] += unigram_score(retrieval, query.entity(i).terms, *doc, indexes.entities, params);
    }
    for (std::size_t i = 0; i < query.num_relationships(); ++i) {
        const auto* doc = indexes.relationships.lookup_pair(tuple[i], tuple[i + 1]);
        if (doc == nullptr) {
            return std::nullopt;
        }
        out.features[idx(Feature::R_T)] +=
            unigram_score(retrieval, query.relationship(i).terms, *doc, indexes.relationships, params);
    }
    out.total = out.features[idx(Feature::E_T)] + out.features[idx(Feature::R_T)];
    return out;
}

std::optional<FeatureVector> erdm_features(const EntityTuple& tuple, const ERQuery& query, const IndexSet& indexes,
                                           const ScoringParams& params, Retrieval retrieval) {
    check_tuple(tuple, query);
    FeatureVector f{};
    for (std::size_t i = 0; i < query.arity(); ++i) {
        const auto* doc = indexes.entities.lookup(tuple[i]);
        if (doc == nullptr) {
            return std::nullopt;
        }
        auto t = text_features(retrieval, query.entity(i).terms, *doc, indexes.entities, params);
        f[idx(Feature::E_T)] += t.unigram;
        f[idx(Feature::E_O)] += t.ordered;
        f[idx(Feature::E_U)] += t.unordered;
    }
    std::vector<EntityPair> pairs;
    const auto& rstats = indexes.relationships.stats();
    for (std::size_t i = 0; i < query.num_relationships(); ++i) {
        auto pair = EntityPair::normalized(tuple[i], tuple[i + 1]);
        const auto* doc = indexes.relationships.lookup(pair);
        if (doc == nullptr) {
            return std::nullopt;
        }
        auto t = text_features(retrieval, query.relationship(i).terms, *doc, indexes.relationships, params);
        f[idx(Feature::R_T)] += t.unigram;
        f[idx(Feature::R_O)] += t.ordered;
        f[idx(Feature::R_U)] += t.unordered;
        f[idx(Feature::ER_S)] += f_er_s(tuple[i], pair, rstats, params.alpha);
        f[idx(Feature::ER_S)] += f_er_s(tuple[i + 1], pair, rstats, params.alpha);
        pairs.push_back(std::move(pair));
    }
    for (std::size_t i = 1; i < pairs.size(); ++i) {
        f[idx(Feature::RER_S)] += f_rer_s(tuple[i], pairs[i - 1], pairs[i]);
    }
    return f;
}

std::optional<ScoredTuple> score_erdm(const EntityTuple& tuple, const ERQuery& query, const IndexSet& indexes,
                                      const ScoringParams& params, const FeatureVector& weights,
                                      Retrieval retrieval) {
    auto f = erdm_features(tuple, query, indexes, params, retrieval);
    if (!f) {
        return std::nullopt;
    }
    return ScoredTuple{tuple, dot(weights, *f), *f};
}

std::optional<ScoredTuple> score_erdm(const EntityTuple& tuple, const ERQuery& query, const IndexSet& indexes,
                                      const ScoringParams& params, const LambdaWeights& weights,
                                      Retrieval retrieval) {
    return score_erdm(tuple, query, indexes, params, weights.values(), retrieval);
}

std::vector<ScoredTuple> dedup_orientations(std::vector<ScoredTuple> scored) {
    std::map<EntityTuple, ScoredTuple> best;
    for (auto& s : scored) {
        auto canonical = canonical_tuple(s.tuple);
        auto it = best.find(canonical);
        if (it == best.end()) {
            best.emplace(std::move(canonical), std::move(s));
            continue;
        }
        auto& kept = it->second;
        if (s.total > kept.total || (s.total == kept.total && s.tuple < kept.tuple)) {
            kept = std::move(s);
        }
    }
    std::vector<ScoredTuple> out;
    out.reserve(best.size());
    for (auto& [canonical, s] : best) {
        s.tuple = canonical;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ScoredTuple> rank(std::vector<ScoredTuple> scored, std::size_t cutoff) {
    auto better = [](const ScoredTuple& a, const ScoredTuple& b) {
        if (a.total != b.total) {
            return a.total > b.total;
        }
        return a.tuple < b.tuple;
    };
    if (scored.size() > cutoff) {
        std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(cutoff), scored.end(), better);
        scored.resize(cutoff);
    } else {
        std::sort(scored.begin(), scored.end(), better);
    }
    return scored;
}

double sdm_score(const Terms& terms, const MetaDoc& doc, const MetaDocIndex& index, const ScoringParams& params) {
    auto t = text_features(Retrieval::lm, terms, doc, index, params);
    return sdm_default_weights[0] * t.unigram + sdm_default_weights[1] * t.ordered +
           sdm_default_weights[2] * t.unordered;
}

std::vector<ScoredKey> sdm_ranking(const Terms& terms, const MetaDocIndex& index, const ScoringParams& params,
                                   std::size_t k) {
    std::vector<ScoredKey> out;
    for (const auto& c : index.match_candidates(terms, k)) {
        out.push_back(ScoredKey{c.doc->key, sdm_score(terms, *c.doc, index, params)});
    }
    std::sort(out.begin(), out.end(), [](const ScoredKey& a, const ScoredKey& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.key < b.key;
    });
    return out;
}

std::vector<ScoredTuple> top_pair_sums(const std::vector<ScoredKey>& left, const std::vector<ScoredKey>& right,
                                       std::size_t cutoff) {
    if (left.empty() || right.empty() || cutoff == 0) {
        return {};
    }
    struct Cell {
        double sum;
        std::size_t i;
        std::size_t j;
    };
    auto worse = [](const Cell& a, const Cell& b) {
        if (a.sum != b.sum) {
            return a.sum < b.sum;
        }
        return std::tie(a.i, a.j) > std::tie(b.i, b.j);
    };
    std::priority_queue<Cell, std::vector<Cell>, decltype(worse)> frontier(worse);
    std::set<std::pair<std::size_t, std::size_t>> pushed;
    auto push = [&](std::size_t i, std::size_t j) {
        if (i < left.size() && j < right.size() && pushed.emplace(i, j).second) {
            frontier.push(Cell{left[i].score + right[j].score, i, j});
        }
    };
    push(0, 0);

    std::map<EntityTuple, ScoredTuple> best;
    std::optional<double> threshold;
    while (!frontier.empty()) {
        auto cell = frontier.top();
        if (threshold && cell.sum < *threshold) {
            break;
        }
        frontier.pop();
        push(cell.i + 1, cell.j);
        push(cell.i, cell.j + 1);
        const auto& a = left[cell.i].key;
        const auto& b = right[cell.j].key;
        if (a == b) {
            continue;
        }
        EntityTuple canonical = a < b ? EntityTuple{a, b} : EntityTuple{b, a};
        if (best.count(canonical) == 0) {
            best.emplace(canonical, ScoredTuple{canonical, cell.sum, {}});
            if (!threshold && best.size() == cutoff) {
                threshold = cell.sum;
            }
        }
    }
    std::vector<ScoredTuple> out;
    out.reserve(best.size());
    for (auto& [key, s] : best) {
        out.push_back(std::move(s));
    }
    return rank(std::move(out), cutoff);
}

namespace {

void require_pair_query(const ERQuery& query, std::string_view baseline) {
    if (query.arity() != 2) {
        throw ValidationError(std::string(baseline) + " only supports |Q|=3 queries (query " + query.id() + ")");
    }
}

Terms concat(const Terms& a, const Terms& b) {
    Terms out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

std::vector<ScoredTuple> baseline_base_ee(const ERQuery& query, const MetaDocIndex& entity_index,
                                          const ScoringParams& params, std::size_t k, std::size_t cutoff) {
    require_pair_query(query, "BaseEE");
    auto left = sdm_ranking(concat(query.entity(0).terms, query.relationship(0).terms), entity_index, params, k);
    auto right = sdm_ranking(concat(query.relationship(0).terms, query.entity(1).terms), entity_index, params, k);
    return top_pair_sums(left, right, cutoff);
}

std::vector<ScoredTuple> baseline_base_e(const ERQuery& query, const MetaDocIndex& entity_index,
                                         const ScoringParams& params, std::size_t k, std::size_t cutoff) {
    require_pair_query(query, "BaseE");
    auto list = sdm_ranking(query.all_terms(), entity_index, params, k);
    return top_pair_sums(list, list, cutoff);
}

std::vector<ScoredTuple> baseline_base_r(const ERQuery& query, const MetaDocIndex& sentence_pair_index,
                                         const ScoringParams& params, std::size_t k, std::size_t cutoff) {
    require_pair_query(query, "BaseR");
    std::vector<ScoredTuple> out;
    for (const auto& s : sdm_ranking(query.all_terms(), sentence_pair_index, params, k)) {
        auto pair = EntityPair::from_key(s.key);
        out.push_back(ScoredTuple{{pair.first, pair.second}, s.score, {}});
    }
    return rank(std::move(out), cutoff);
}

Model parse_model(std::string_view name) {
    static const std::map<std::string_view, Model> models = {
        {"ef-lm", Model::ef_lm},       {"ef-bm25", Model::ef_bm25}, {"erdm-lm", Model::erdm_lm},
        {"erdm-bm25", Model::erdm_bm25}, {"base-ee", Model::base_ee}, {"base-e", Model::base_e},
        {"base-r", Model::base_r}};
    auto it = models.find(name);
    if (it == models.end()) {
        throw ValidationError("unknown model '" + std::string(name) + "'");
    }
    return it->second;
}

std::string_view model_name(Model model) {
    switch (model) {
        case Model::ef_lm: return "ef-lm";
        case Model::ef_bm25: return "ef-bm25";
        case Model::erdm_lm: return "erdm-lm";
        case Model::erdm_bm25: return "erdm-bm25";
        case Model::base_ee: return "base-ee";
        case Model::base_e: return "base-e";
        case Model::base_r: return "base-r";
    }
    return "unknown";
}

bool is_erdm(Model model) { return model == Model::erdm_lm || model == Model::erdm_bm25; }

void check_compatible(const IndexSet& indexes, const ScoringParams& params) {
    params.validate();
    auto check = [&](const MetaDocIndex& index, const char* name) {
        if (index.options().window != params.window) {
            throw ValidationError(std::string(name) + " index was built with window " +
                                  std::to_string(index.options().window) + " but scoring uses window " +
                                  std::to_string(params.window));
        }
    };
    check(indexes.entities, "entity");
    check(indexes.relationships, "relationship");
    if (indexes.sentence_pairs) {
        check(*indexes.sentence_pairs, "sentence-pair");
    }
}

std::vector<ScoredTuple> search(const ERQuery& query, const IndexSet& indexes, Model model,
                                const SearchOptions& options) {
    switch (model) {
        case Model::base_ee:
            return baseline_base_ee(query, indexes.entities, options.params, options.k, options.cutoff);
        case Model::base_e:
            return baseline_base_e(query, indexes.entities, options.params, options.k, options.cutoff);
        case Model::base_r:
            if (!indexes.sentence_pairs) {
                throw ValidationError("base-r needs the sentence-pair index (build-index --sentence-pairs)");
            }
            return baseline_base_r(query, *indexes.sentence_pairs, options.params, options.k, options.cutoff);
        default:
            break;
    }
    const auto retrieval = (model == Model::ef_lm || model == Model::erdm_lm) ? Retrieval::lm : Retrieval::bm25;
    auto tuples = join_candidates(query, retrieve_candidates(query, indexes, options.k));
    std::vector<ScoredTuple> scored;
    scored.reserve(tuples.size());
    for (const auto& t : tuples) {
        auto s = is_erdm(model) ? score_erdm(t, query, indexes, options.params, options.weights, retrieval)
                                : score_ef(t, query, indexes, options.params, retrieval);
        if (s) {
            scored.push_back(std::move(*s));
        }
    }
    return rank(dedup_orientations(std::move(scored)), options.cutoff);
}

}  // namespace erdm
