#include "erdm/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "erdm/error.hpp"

namespace erdm {

void ScoringParams::validate() const {
    if (mu_entity && !(*mu_entity > 0.0)) {
        throw ValidationError("mu_E must be positive");
    }
    if (mu_relationship && !(*mu_relationship > 0.0)) {
        throw ValidationError("mu_R must be positive");
    }
    if (!(k1 >= 0.0)) {
        throw ValidationError("k1 must be non-negative");
    }
    if (!(b >= 0.0 && b <= 1.0)) {
        throw ValidationError("b must lie in [0,1]");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ValidationError("alpha must lie in [0,1]");
    }
    if (window < 2) {
        throw ValidationError("window must be at least 2");
    }
}

double ScoringParams::mu_for(const MetaDocIndex& index) const {
    const auto& explicit_mu = index.kind() == IndexKind::entity ? mu_entity : mu_relationship;
    if (explicit_mu) {
        return *explicit_mu;
    }
    double avg = index.stats().avg_len();
    return avg > 0.0 ? avg : 1.0;
}

ScoringParams ScoringParams::from_json(std::string_view text) {
    ScoringParams p;
    try {
        auto j = nlohmann::json::parse(text);
        if (!j.is_object()) {
            throw ParseError("params must be a JSON object");
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            const auto& key = it.key();
            if (key == "mu_E") {
                p.mu_entity = it.value().get<double>();
            } else if (key == "mu_R") {
                p.mu_relationship = it.value().get<double>();
            } else if (key == "k1") {
                p.k1 = it.value().get<double>();
            } else if (key == "b") {
                p.b = it.value().get<double>();
            } else if (key == "alpha") {
                p.alpha = it.value().get<double>();
            } else if (key == "window") {
                p.window = it.value().get<unsigned>();
            } else {
                throw ParseError("unknown scoring parameter '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid params JSON: ") + e.what());
    }
    p.validate();
    return p;
}

ScoringParams ScoringParams::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::string ScoringParams::to_json() const {
    nlohmann::json j{{"k1", k1}, {"b", b}, {"alpha", alpha}, {"window", window}};
    if (mu_entity) {
        j["mu_E"] = *mu_entity;
    }
    if (mu_relationship) {
        j["mu_R"] = *mu_relationship;
    }
    return j.dump();
}

double dirichlet_log(Count tf, Count doc_len, Count cf, Count collection_len, double mu) {
    double background = collection_len == 0 ? 0.0 : static_cast<double>(cf) / static_cast<double>(collection_len);
    double numerator = static_cast<double>(tf) + mu * background;
    if (numerator <= 0.0) {
        numerator = lm_floor_epsilon;
    }
    return std::log(numerator / (static_cast<double>(doc_len) + mu));
}

double bm25_weight(Count tf, Count df, Count num_docs, Count doc_len, double avg_len, double k1, double b) {
    if (tf == 0) {
        return 0.0;
    }
    const double n = static_cast<double>(df);
    const double idf = std::max(0.0, std::log((static_cast<double>(num_docs) - n + 0.5) / (n + 0.5)));
    const double ratio = avg_len > 0.0 ? static_cast<double>(doc_len) / avg_len : 1.0;
    const double f = static_cast<double>(tf);
    return idf * f * (k1 + 1.0) / (f + k1 * (1.0 - b + b * ratio));
}

double lm_unigram(std::string_view term, const MetaDoc& doc, const CollectionStats& stats, double mu) {
    return dirichlet_log(doc.term(term), doc.length, CollectionStats::get(stats.cf, term), stats.total_terms, mu);
}

double lm_ordered(std::string_view t1, std::string_view t2, const MetaDoc& doc, const CollectionStats& stats,
                  double mu) {
    return dirichlet_log(doc.ordered(t1, t2), doc.length, CollectionStats::get(stats.cf_ordered, ordered_key(t1, t2)),
                         stats.total_terms, mu);
}

double lm_unordered(std::string_view t1, std::string_view t2, const MetaDoc& doc, const CollectionStats& stats,
                    double mu) {
    return dirichlet_log(doc.unordered(t1, t2), doc.length,
                         CollectionStats::get(stats.cf_window, window_key(t1, t2)), stats.total_terms, mu);
}

double bm25_unigram(std::string_view term, const MetaDoc& doc, const CollectionStats& stats, double k1, double b) {
    return bm25_weight(doc.term(term), CollectionStats::get(stats.df, term), stats.num_docs, doc.length,
                       stats.avg_len(), k1, b);
}

double bm25_ordered(std::string_view t1, std::string_view t2, const MetaDoc& doc, const CollectionStats& stats,
                    double k1, double b) {
    return bm25_weight(doc.ordered(t1, t2), CollectionStats::get(stats.df_ordered, ordered_key(t1, t2)),
                       stats.num_docs, doc.length, stats.avg_len(), k1, b);
}

double bm25_unordered(std::string_view t1, std::string_view t2, const MetaDoc& doc, const CollectionStats& stats,
                      double k1, double b) {
    return bm25_weight(doc.unordered(t1, t2), CollectionStats::get(stats.df_window, window_key(t1, t2)),
                       stats.num_docs, doc.length, stats.avg_len(), k1, b);
}

double f_er_s(std::string_view entity, const EntityPair& pair, const CollectionStats& relationship_stats,
              double alpha) {
    double member = pair.contains(entity) ? 1.0 : 0.0;
    double popularity = 0.0;
    if (relationship_stats.num_docs > 0) {
        popularity = static_cast<double>(CollectionStats::get(relationship_stats.entity_pair_membership, entity)) /
                     static_cast<double>(relationship_stats.num_docs);
    }
    return (1.0 - alpha) * member + alpha * popularity;
}

double f_rer_s(std::string_view entity, const EntityPair& left, const EntityPair& right) {
    return left.contains(entity) && right.contains(entity) ? 1.0 : 0.0;
}

TextFeatures text_features(Retrieval retrieval, const Terms& terms, const MetaDoc& doc, const MetaDocIndex& index,
                           const ScoringParams& params) {
    TextFeatures out;
    const auto& stats = index.stats();
    if (retrieval == Retrieval::lm) {
        const double mu = params.mu_for(index);
        for (std::size_t i = 0; i < terms.size(); ++i) {
            out.unigram += lm_unigram(terms[i], doc, stats, mu);
            if (i + 1 < terms.size()) {
                out.ordered += lm_ordered(terms[i], terms[i + 1], doc, stats, mu);
                out.unordered += lm_unordered(terms[i], terms[i + 1], doc, stats, mu);
            }
        }
    } else {
        for (std::size_t i = 0; i < terms.size(); ++i) {
            out.unigram += bm25_unigram(terms[i], doc, stats, params.k1, params.b);
            if (i + 1 < terms.size()) {
                out.ordered += bm25_ordered(terms[i], terms[i + 1], doc, stats, params.k1, params.b);
                out.unordered += bm25_unordered(terms[i], terms[i + 1], doc, stats, params.k1, params.b);
            }
        }
    }
    return out;
}

double unigram_score(Retrieval retrieval, const Terms& terms, const MetaDoc& doc, const MetaDocIndex& index,
                     const ScoringParams& params) {
    double total = 0.0;
    if (retrieval == Retrieval::lm) {
        const double mu = params.mu_for(index);
        for (const auto& t : terms) {
            total += lm_unigram(t, doc, index.stats(), mu);
        }
    } else {
        for (const auto& t : terms) {
            total += bm25_unigram(t, doc, index.stats(), params.k1, params.b);
        }
    }
    return total;
}

}  // namespace erdm
