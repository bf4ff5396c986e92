#include "erdm/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "erdm/error.hpp"

namespace erdm {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_run(std::ostream& out, const std::string& query_id, const std::vector<ScoredTuple>& ranked,
               std::string_view run_tag) {
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        out << query_id << '\t' << tuple_key(ranked[i].tuple) << '\t' << (i + 1) << '\t'
            << format_double(ranked[i].total) << '\t' << run_tag << '\n';
    }
}

Run parse_run(std::string_view content) {
    Run run;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < content.size()) {
        auto nl = content.find('\n', pos);
        auto line = content.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? content.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.find_first_not_of(" \t") == std::string_view::npos) {
            continue;
        }
        std::vector<std::string> fields;
        std::size_t p = 0;
        while (true) {
            auto tab = line.find('\t', p);
            fields.emplace_back(line.substr(p, tab == std::string_view::npos ? std::string_view::npos : tab - p));
            if (tab == std::string_view::npos) {
                break;
            }
            p = tab + 1;
        }
        auto where = "run line " + std::to_string(line_no) + ": ";
        if (fields.size() != 5) {
            throw ParseError(where + "expected 5 TAB-separated fields");
        }
        RunEntry e;
        try {
            e.tuple = parse_tuple(fields[1]);
            std::size_t used = 0;
            long long r = std::stoll(fields[2], &used);
            if (used != fields[2].size() || r < 1) {
                throw ParseError("bad rank");
            }
            e.rank = static_cast<std::size_t>(r);
            e.score = std::stod(fields[3]);
        } catch (const ParseError& ex) {
            throw ParseError(where + ex.what());
        } catch (const std::exception&) {
            throw ParseError(where + "rank or score is not a number");
        }
        run[fields[0]].push_back(std::move(e));
    }
    for (auto& [qid, entries] : run) {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const RunEntry& a, const RunEntry& b) { return a.rank < b.rank; });
    }
    return run;
}

Run load_run(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_run(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

Judgments make_judgments(const std::vector<QrelRecord>& records) {
    Judgments j;
    for (const auto& r : records) {
        j[canonical_tuple(r.tuple)] = r.relevance;
    }
    return j;
}

namespace {

int grade(const EntityTuple& t, const Judgments& judgments) {
    auto it = judgments.find(canonical_tuple(t));
    return it == judgments.end() ? 0 : it->second;
}

std::size_t total_relevant(const Judgments& judgments) {
    return static_cast<std::size_t>(
        std::count_if(judgments.begin(), judgments.end(), [](const auto& kv) { return kv.second > 0; }));
}

}  // namespace

std::optional<double> average_precision(const std::vector<EntityTuple>& ranked, const Judgments& judgments,
                                        std::size_t cutoff) {
    auto r = total_relevant(judgments);
    if (r == 0) {
        return std::nullopt;
    }
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranked.size() && i < cutoff; ++i) {
        if (grade(ranked[i], judgments) > 0) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(r);
}

double precision_at(const std::vector<EntityTuple>& ranked, const Judgments& judgments, std::size_t k) {
    if (k == 0) {
        return 0.0;
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
        if (grade(ranked[i], judgments) > 0) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(k);
}

double reciprocal_rank(const std::vector<EntityTuple>& ranked, const Judgments& judgments) {
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (grade(ranked[i], judgments) > 0) {
            return 1.0 / static_cast<double>(i + 1);
        }
    }
    return 0.0;
}

std::optional<double> ndcg_at(const std::vector<EntityTuple>& ranked, const Judgments& judgments, std::size_t k) {
    auto gain = [](int rel) { return rel > 0 ? std::exp2(static_cast<double>(rel)) - 1.0 : 0.0; };
    std::vector<int> ideal;
    for (const auto& [t, rel] : judgments) {
        if (rel > 0) {
            ideal.push_back(rel);
        }
    }
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < ideal.size() && i < k; ++i) {
        idcg += gain(ideal[i]) / std::log2(static_cast<double>(i) + 2.0);
    }
    if (idcg <= 0.0) {
        return std::nullopt;
    }
    double dcg = 0.0;
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
        dcg += gain(grade(ranked[i], judgments)) / std::log2(static_cast<double>(i) + 2.0);
    }
    return dcg / idcg;
}

QueryMetrics evaluate_query(const std::string& query_id, const std::vector<EntityTuple>& ranked,
                            const Judgments& judgments) {
    QueryMetrics m;
    m.query_id = query_id;
    m.map = average_precision(ranked, judgments, 100).value_or(0.0);
    m.p10 = precision_at(ranked, judgments, 10);
    m.mrr = reciprocal_rank(ranked, judgments);
    m.ndcg20 = ndcg_at(ranked, judgments, 20).value_or(0.0);
    m.retrieved = ranked.size();
    m.relevant = total_relevant(judgments);
    for (const auto& t : ranked) {
        if (grade(t, judgments) > 0) {
            ++m.relevant_retrieved;
        }
    }
    return m;
}

MetricReport macro_average(std::vector<QueryMetrics> per_query, std::vector<std::string> flagged) {
    MetricReport report;
    report.per_query = std::move(per_query);
    report.flagged = std::move(flagged);
    if (report.per_query.empty()) {
        return report;
    }
    for (const auto& m : report.per_query) {
        report.map += m.map;
        report.p10 += m.p10;
        report.mrr += m.mrr;
        report.ndcg20 += m.ndcg20;
    }
    const auto n = static_cast<double>(report.per_query.size());
    report.map /= n;
    report.p10 /= n;
    report.mrr /= n;
    report.ndcg20 /= n;
    return report;
}

MetricReport evaluate(const Run& run, const Qrels& qrels, const EvaluateOptions& options) {
    std::set<std::string> ids;
    for (const auto& [qid, entries] : run) {
        ids.insert(qid);
    }
    if (!options.run_queries_only) {
        for (const auto& [qid, records] : qrels) {
            ids.insert(qid);
        }
    }
    std::vector<QueryMetrics> per_query;
    std::vector<std::string> flagged;
    for (const auto& qid : ids) {
        auto q = qrels.find(qid);
        Judgments judgments = q == qrels.end() ? Judgments{} : make_judgments(q->second);
        bool has_relevant = std::any_of(judgments.begin(), judgments.end(), [](const auto& kv) { return kv.second > 0; });
        if (!has_relevant) {
            flagged.push_back(qid);
            continue;
        }
        std::vector<EntityTuple> ranked;
        std::set<EntityTuple> seen;
        if (auto r = run.find(qid); r != run.end()) {
            for (const auto& e : r->second) {
                if (seen.insert(canonical_tuple(e.tuple)).second) {
                    ranked.push_back(e.tuple);
                }
            }
        }
        per_query.push_back(evaluate_query(qid, ranked, judgments));
    }
    return macro_average(std::move(per_query), std::move(flagged));
}

MetricReport evaluate_run(const std::filesystem::path& run, const std::filesystem::path& qrels,
                          const EvaluateOptions& options) {
    return evaluate(load_run(run), load_qrels(qrels), options);
}

std::string format_report(const MetricReport& report, bool per_query) {
    std::ostringstream out;
    out << "metric\tvalue\n";
    out << "map@100\t" << format_double(report.map) << '\n';
    out << "p@10\t" << format_double(report.p10) << '\n';
    out << "mrr\t" << format_double(report.mrr) << '\n';
    out << "ndcg@20\t" << format_double(report.ndcg20) << '\n';
    out << "queries\t" << report.evaluated() << '\n';
    out << "flagged\t" << report.flagged.size() << '\n';
    if (per_query) {
        out << "query_id\tmap@100\tp@10\tmrr\tndcg@20\tretrieved\trelevant\trelevant_retrieved\n";
        for (const auto& m : report.per_query) {
            out << m.query_id << '\t' << format_double(m.map) << '\t' << format_double(m.p10) << '\t'
                << format_double(m.mrr) << '\t' << format_double(m.ndcg20) << '\t' << m.retrieved << '\t'
                << m.relevant << '\t' << m.relevant_retrieved << '\n';
        }
        for (const auto& q : report.flagged) {
            out << q << "\tflagged: no relevant judgments\n";
        }
    }
    return out.str();
}

}  // namespace erdm
