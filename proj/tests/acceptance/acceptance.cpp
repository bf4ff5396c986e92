// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.
//
// usage: erdm_acceptance <work-dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "erdm/cli.hpp"
#include "erdm/evaluation.hpp"
#include "erdm/index.hpp"
#include "erdm/learning.hpp"
#include "erdm/ranking.hpp"
#include "erdm/synth.hpp"
#include "naive_oracle.hpp"

namespace fs = std::filesystem;
using namespace erdm;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects failures without stopping at the first one.
class Checker {
  public:
    void expect(bool ok, const std::string& what) {
        if (!ok) {
            ++failures_;
            if (failures_ <= 5) {
                messages_ << (failures_ > 1 ? "; " : "") << what;
            }
        }
    }
    void note(const std::string& text) { notes_ << (notes_.tellp() > 0 ? ", " : "") << text; }

    Outcome outcome() const {
        Outcome o;
        o.pass = failures_ == 0;
        o.detail = notes_.str();
        if (failures_ > 0) {
            o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(failures_) + " failure(s): " + messages_.str();
        }
        return o;
    }

  private:
    std::size_t failures_ = 0;
    std::ostringstream messages_;
    std::ostringstream notes_;
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

fs::path data_dir() { return ERDM_TEST_DATA_DIR; }

// ---- 1. feature values against a naive recomputation -------------------------

Outcome oracle_equivalence(const fs::path& work) {
    Checker check;
    std::vector<std::pair<std::string, std::vector<AnnotatedDocument>>> corpora;
    corpora.emplace_back("fixture", load_corpus(data_dir() / "fixture_corpus.jsonl"));
    BenchmarkSpec spec;
    spec.seed = 7;
    spec.num_facts = 8;
    spec.num_entities = 40;
    spec.num_docs = 50;
    auto bench = generate_benchmark(spec);
    write_benchmark(bench, work / "c1");
    corpora.emplace_back("synthetic", load_corpus(work / "c1" / "corpus.jsonl"));

    std::size_t compared = 0;
    double worst = 0.0;
    for (const auto& [name, corpus] : corpora) {
        check.expect(corpus.size() <= 50, name + " corpus has more than 50 documents");
        std::vector<Terms> queries = {{"soccer", "player"}, {"top", "model"}, {"dated", "the"},
                                      {"signed", "a", "contract", "with"}, {"unseen", "words", "here"}};
        for (const auto& q : load_queries(data_dir() / "fixture_queries.tsv")) {
            for (const auto& part : q.parts()) {
                queries.push_back(part.terms);
            }
        }
        for (const auto& q : bench.queries) {
            for (const auto& part : q.parts()) {
                queries.push_back(part.terms);
            }
            queries.push_back(q.all_terms());
        }

        for (bool full : {false, true}) {
            IndexSetOptions options;
            options.sentence_pairs = full;
            auto set = build_index_set(corpus, options);
            auto raw = oracle::gather(corpus, full);
            auto ents = oracle::collect(raw.entities, 8, false);
            auto pairs = oracle::collect(raw.pairs, 8, true);
            std::vector<std::pair<const MetaDocIndex*, const oracle::RawCollection*>> targets;
            if (full) {
                targets.emplace_back(&*set.sentence_pairs, &pairs);
            } else {
                targets.emplace_back(&set.entities, &ents);
                targets.emplace_back(&set.relationships, &pairs);
            }
            ScoringParams params;
            for (auto [index, rc] : targets) {
                check.expect(index->size() == rc->docs.size(), name + ": meta-doc count differs");
                const double mu = oracle::average_length(*rc);
                for (const auto& doc : index->docs()) {
                    for (const auto& q : queries) {
                        auto lm = text_features(Retrieval::lm, q, doc, *index, params);
                        auto naive_lm = oracle::lm_features(*rc, doc.key, q, mu);
                        auto bm = text_features(Retrieval::bm25, q, doc, *index, params);
                        auto naive_bm = oracle::bm25_features(*rc, doc.key, q, params.k1, params.b);
                        const double diffs[] = {lm.unigram - naive_lm.unigram,   lm.ordered - naive_lm.ordered,
                                                lm.unordered - naive_lm.unordered, bm.unigram - naive_bm.unigram,
                                                bm.ordered - naive_bm.ordered,   bm.unordered - naive_bm.unordered};
                        for (double d : diffs) {
                            worst = std::max(worst, std::abs(d));
                            check.expect(std::abs(d) <= 1e-9, name + " key " + doc.key + " differs by " +
                                                                   std::to_string(d));
                            ++compared;
                        }
                    }
                }
            }
        }
    }
    check.note(std::to_string(compared) + " feature values, max |diff| " + [&] {
        std::ostringstream s;
        s << worst;
        return s.str();
    }());
    return check.outcome();
}

// ---- 2. join against brute force ---------------------------------------------

Outcome join_correctness() {
    Checker check;
    std::mt19937_64 gen(20240501);
    auto pick = [&](std::size_t n) { return static_cast<std::size_t>(gen() % n); };
    auto q3 = parse_query("Q\ta\tb\tc");
    auto q5 = parse_query("Q\ta\tb\tc\td\te");
    std::size_t total_tuples = 0;
    for (int round = 0; round < 200; ++round) {
        const bool five = round % 2 == 1;
        const std::size_t universe = 4 + pick(20);
        auto name = [](std::size_t i) { return "E" + std::to_string(i); };
        CandidateSets c;
        std::vector<std::vector<std::string>> entities;
        for (std::size_t s = 0; s < (five ? 3u : 2u); ++s) {
            std::set<std::string> chosen;
            for (auto n = pick(21); n > 0 && chosen.size() < 20; --n) {
                chosen.insert(name(pick(universe)));
            }
            c.entities.emplace_back(chosen.begin(), chosen.end());
            entities.emplace_back(chosen.begin(), chosen.end());
        }
        std::vector<std::set<std::string>> keys;
        for (std::size_t r = 0; r < (five ? 2u : 1u); ++r) {
            std::set<EntityPair> chosen;
            for (auto n = pick(40); n > 0 && chosen.size() < 20; --n) {
                auto a = pick(universe), b = pick(universe);
                if (a != b) {
                    chosen.insert(EntityPair::normalized(name(a), name(b)));
                }
            }
            c.relationships.emplace_back(chosen.begin(), chosen.end());
            std::set<std::string> k;
            for (const auto& p : chosen) {
                k.insert(p.key());
            }
            keys.push_back(std::move(k));
        }
        auto got = join_candidates(five ? q5 : q3, c);
        std::set<EntityTuple> got_set(got.begin(), got.end());
        check.expect(got_set.size() == got.size(), "duplicate tuples in round " + std::to_string(round));
        check.expect(got_set == oracle::brute_force_join(entities, keys), "mismatch in round " + std::to_string(round));
        total_tuples += got.size();
    }
    check.note("200 instances, " + std::to_string(total_tuples) + " joined tuples");
    return check.outcome();
}

// ---- 3. ERDM reduces to EF -----------------------------------------------------

Outcome ef_reduction(const fs::path& work) {
    Checker check;
    SearchOptions ef;
    ef.cutoff = 100000;
    SearchOptions erdm = ef;
    erdm.params.alpha = 0.0;
    FeatureVector unigram{};
    unigram[idx(Feature::E_T)] = 0.5;
    unigram[idx(Feature::R_T)] = 0.5;
    erdm.weights = LambdaWeights(unigram);

    // The fixture, plus the small synthetic corpus written by criterion 1.
    const std::pair<fs::path, fs::path> inputs[] = {
        {data_dir() / "fixture_corpus.jsonl", data_dir() / "fixture_queries.tsv"},
        {work / "c1" / "corpus.jsonl", work / "c1" / "queries.tsv"}};
    std::size_t queries = 0, tuples = 0;
    for (const auto& [corpus, query_file] : inputs) {
        auto set = build_index_set(load_corpus(corpus));
        for (const auto& q : load_queries(query_file)) {
            auto a = search(q, set, Model::ef_lm, ef);
            auto b = search(q, set, Model::erdm_lm, erdm);
            check.expect(a.size() == b.size(), q.id() + ": result counts differ");
            check.expect(!a.empty(), q.id() + ": no results");
            for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
                check.expect(a[i].tuple == b[i].tuple, q.id() + ": rank " + std::to_string(i + 1) + " differs");
            }
            ++queries;
            tuples += a.size();
        }
    }
    check.note(std::to_string(queries) + " queries, " + std::to_string(tuples) + " ranked tuples");
    return check.outcome();
}

// ---- 4. metrics ------------------------------------------------------------------

Outcome metric_correctness(const fs::path& work) {
    Checker check;
    std::ostringstream run, qrels;
    // AP and NDCG example: relevant at ranks 1 and 3 of two relevant.
    run << "QA\tA|R1\t1\t3\tt\nQA\tA|N1\t2\t2\tt\nQA\tA|R2\t3\t1\tt\n";
    qrels << "QA\tA|R1\t1\nQA\tA|R2\t1\n";
    // RR example: first relevant at rank 3.
    run << "QB\tB|N1\t1\t3\tt\nQB\tB|N2\t2\t2\tt\nQB\tB|R1\t3\t1\tt\n";
    qrels << "QB\tB|R1\t1\n";
    // P@10 examples: seven results with three relevant; ten relevant in the top ten.
    for (int i = 1; i <= 7; ++i) {
        run << "QC\tC|X" << i << '\t' << i << '\t' << -i << "\tt\n";
    }
    qrels << "QC\tC|X1\t1\nQC\tC|X4\t1\nQC\tC|X7\t1\n";
    for (int i = 1; i <= 10; ++i) {
        run << "QD\tD|X" << std::setw(2) << std::setfill('0') << i << '\t' << i << '\t' << -i << "\tt\n";
        qrels << "QD\tD|X" << std::setw(2) << std::setfill('0') << i << "\t1\n";
    }
    write_file(work / "metrics_run.tsv", run.str());
    write_file(work / "metrics_qrels.tsv", qrels.str());
    auto report = evaluate_run(work / "metrics_run.tsv", work / "metrics_qrels.tsv");
    std::map<std::string, QueryMetrics> by_id;
    for (const auto& m : report.per_query) {
        by_id[m.query_id] = m;
    }
    auto near = [](double a, double b) { return std::abs(a - b) <= 1e-6; };
    check.expect(near(by_id["QA"].map, (1.0 + 2.0 / 3.0) / 2.0), "AP " + fmt(by_id["QA"].map, 6));
    check.expect(near(by_id["QA"].map, 0.833333), "AP against 0.833333");
    check.expect(near(by_id["QA"].ndcg20, 1.5 / (1.0 + 1.0 / std::log2(3.0))), "NDCG " + fmt(by_id["QA"].ndcg20, 6));
    check.expect(near(by_id["QA"].ndcg20, 0.919721), "NDCG against 0.919721");
    check.expect(near(by_id["QB"].mrr, 1.0 / 3.0), "RR " + fmt(by_id["QB"].mrr, 6));
    check.expect(near(by_id["QC"].p10, 0.3), "P@10 short list " + fmt(by_id["QC"].p10, 6));
    check.expect(near(by_id["QD"].p10, 1.0), "P@10 all relevant " + fmt(by_id["QD"].p10, 6));
    check.note("AP " + fmt(by_id["QA"].map, 6) + ", NDCG@20 " + fmt(by_id["QA"].ndcg20, 6) + ", RR " +
               fmt(by_id["QB"].mrr, 6));

    // Permutation monotonicity: swapping a relevant tuple with a less relevant
    // one ranked above it never lowers AP, RR or NDCG.
    std::mt19937_64 gen(77);
    std::size_t swaps = 0;
    while (swaps < 500) {
        const std::size_t n = 2 + gen() % 40;
        std::vector<EntityTuple> ranking;
        Judgments judgments;
        for (std::size_t i = 0; i < n; ++i) {
            ranking.push_back({"E" + std::to_string(i), "F"});
            if (gen() % 3 == 0) {
                judgments[canonical_tuple(ranking.back())] = 1 + static_cast<int>(gen() % 3);
            }
        }
        // Judged but unretrieved tuples also count towards R.
        for (auto extra = gen() % 3; extra > 0; --extra) {
            judgments[{"F", "U" + std::to_string(extra)}] = 1;
        }
        std::shuffle(ranking.begin(), ranking.end(), gen);
        auto grade = [&](const EntityTuple& t) {
            auto it = judgments.find(canonical_tuple(t));
            return it == judgments.end() ? 0 : it->second;
        };
        std::size_t hi = 1 + gen() % (n - 1), lo = gen() % hi;
        if (grade(ranking[hi]) == 0 || grade(ranking[lo]) >= grade(ranking[hi])) {
            continue;
        }
        auto moved = ranking;
        std::swap(moved[lo], moved[hi]);
        ++swaps;
        check.expect(*average_precision(moved, judgments) >= *average_precision(ranking, judgments) - 1e-15,
                     "AP decreased");
        check.expect(reciprocal_rank(moved, judgments) >= reciprocal_rank(ranking, judgments), "RR decreased");
        check.expect(*ndcg_at(moved, judgments) >= *ndcg_at(ranking, judgments) - 1e-15, "NDCG decreased");
    }
    check.note("500 random swaps");
    return check.outcome();
}

// ---- 5. coordinate ascent -----------------------------------------------------

std::vector<TrainingInstance> perfect_feature_instances() {
    // E_O separates relevant from non-relevant perfectly; R_T is large noise
    // and ER_S a weaker noisy copy of the signal.
    std::mt19937_64 gen(5);
    std::normal_distribution<double> normal;
    std::vector<TrainingInstance> out;
    for (int q = 0; q < 12; ++q) {
        TrainingInstance inst;
        inst.query_id = "Q" + std::to_string(10 + q);
        for (int c = 0; c < 40; ++c) {
            TrainingCandidate cand;
            cand.tuple = {"A" + std::to_string(100 + c), "B" + std::to_string(100 + c)};
            cand.relevance = c % 7 == 0 ? 1 : 0;
            FeatureVector f{};
            f[idx(Feature::E_O)] = cand.relevance > 0 ? 1.0 : 0.0;
            f[idx(Feature::R_T)] = 20.0 * normal(gen);
            f[idx(Feature::ER_S)] = f[idx(Feature::E_O)] + 2.0 * normal(gen);
            cand.orientations.push_back(f);
            if (cand.relevance > 0) {
                inst.judgments[canonical_tuple(cand.tuple)] = 1;
                ++inst.total_relevant;
            }
            inst.candidates.push_back(std::move(cand));
        }
        out.push_back(std::move(inst));
    }
    return out;
}

Outcome learning_sanity() {
    Checker check;
    auto instances = perfect_feature_instances();
    AscentOptions options;
    options.seed = 11;
    auto a = coordinate_ascent(instances, options);
    const auto& w = a.weights.values();
    const auto top = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
    check.expect(top == idx(Feature::E_O), "largest weight is on " + std::string(feature_names[top]));
    check.expect(a.train_map == 1.0, "training MAP " + fmt(a.train_map));
    for (std::size_t i = 1; i < a.trace.size(); ++i) {
        check.expect(a.trace[i] >= a.trace[i - 1], "training MAP decreased at step " + std::to_string(i));
    }
    double sum = 0.0;
    for (double x : w) {
        check.expect(x >= 0.0, "negative weight");
        sum += x;
    }
    check.expect(std::abs(sum - 1.0) <= 1e-9, "weights sum to " + std::to_string(sum));
    auto b = coordinate_ascent(instances, options);
    options.threads = 3;
    auto c = coordinate_ascent(instances, options);
    check.expect(a.weights == b.weights && a.trace == b.trace, "repeat run differs");
    check.expect(a.weights == c.weights && a.trace == c.trace, "threaded run differs");
    check.note("lambda(E_O) " + fmt(w[idx(Feature::E_O)]) + ", training MAP " + fmt(a.train_map) + " after " +
               std::to_string(a.trace.size() - 1) + " accepted steps");
    return check.outcome();
}

// ---- 6 and 7. end-to-end pipeline ----------------------------------------------

struct Pipeline {
    bool ok = true;
    std::string error;
    std::map<std::string, double> map;  // model -> macro MAP
    std::vector<fs::path> artifacts;
};

std::map<std::string, std::string> parse_report(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto tab = line.find('\t');
        if (tab != std::string::npos) {
            out.emplace(line.substr(0, tab), line.substr(tab + 1));
        }
    }
    return out;
}

Pipeline run_pipeline(const fs::path& dir) {
    Pipeline p;
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto cli = [&](std::vector<std::string> args, const std::string& save_as = {}) {
        if (!p.ok) {
            return std::string();
        }
        std::ostringstream out, err;
        int code = cli::run(args, out, err);
        if (code != 0) {
            p.ok = false;
            p.error = args.front() + " exited " + std::to_string(code) + ": " + err.str();
        }
        if (!save_as.empty()) {
            write_file(dir / save_as, out.str());
            p.artifacts.push_back(dir / save_as);
        }
        return out.str();
    };
    auto bench = (dir / "bench").string();
    auto index = (dir / "index").string();
    auto train = (dir / "train").string();
    cli({"gen-benchmark", "--seed", "1", "--facts", "50", "--entities", "200", "--docs", "500", "--out", bench});
    cli({"build-index", "--corpus", bench + "/corpus.jsonl", "--out", index, "--sentence-pairs"});
    cli({"train", "--index", index, "--queries", bench + "/queries.tsv", "--qrels", bench + "/qrels.tsv", "--model",
         "erdm-lm", "--folds", "5", "--seed", "1", "--threads", "2", "--out", train});
    for (const auto* f : {"weights.json", "folds.json", "cv_report.tsv", "fold_0.json", "fold_4.json"}) {
        p.artifacts.push_back(fs::path(train) / f);
    }
    for (std::string model : {"erdm-lm", "base-r", "base-e", "base-ee"}) {
        auto run = (dir / ("run_" + model + ".tsv")).string();
        std::vector<std::string> args{"search", "--index", index, "--queries", bench + "/queries.tsv", "--model",
                                      model, "--threads", "2", "--out", run};
        if (model == "erdm-lm") {
            args.insert(args.end(), {"--weights", train});
        }
        cli(args);
        p.artifacts.push_back(run);
        auto report = cli({"evaluate", "--run", run, "--qrels", bench + "/qrels.tsv", "--per-query"},
                          "eval_" + model + ".tsv");
        if (p.ok) {
            p.map[model] = std::stod(parse_report(report).at("map@100"));
        }
    }
    return p;
}

Outcome method_ordering(const fs::path& work, Pipeline& first) {
    Checker check;
    first = run_pipeline(work / "pipeline_1");
    check.expect(first.ok, first.error);
    if (!first.ok) {
        return check.outcome();
    }
    auto m = first.map;
    check.expect(m["erdm-lm"] > m["base-r"], "ERDM-LM does not beat BaseR");
    check.expect(m["base-r"] > m["base-e"], "BaseR does not beat BaseE");
    check.expect(m["base-e"] >= m["base-ee"], "BaseE below BaseEE");
    check.expect(m["erdm-lm"] >= 0.8, "ERDM-LM MAP below 0.8");
    check.note("MAP ERDM-LM " + fmt(m["erdm-lm"]) + " > BaseR " + fmt(m["base-r"]) + " > BaseE " + fmt(m["base-e"]) +
               " >= BaseEE " + fmt(m["base-ee"]));
    return check.outcome();
}

Outcome determinism(const fs::path& work, const Pipeline& first) {
    Checker check;
    check.expect(first.ok, "first pipeline run failed");
    auto second = run_pipeline(work / "pipeline_2");
    check.expect(second.ok, second.error);
    if (!first.ok || !second.ok) {
        return check.outcome();
    }
    check.expect(first.artifacts.size() == second.artifacts.size(), "artifact lists differ");
    std::size_t bytes = 0;
    for (std::size_t i = 0; i < std::min(first.artifacts.size(), second.artifacts.size()); ++i) {
        auto a = read_file(first.artifacts[i]);
        auto b = read_file(second.artifacts[i]);
        check.expect(!a.empty(), first.artifacts[i].filename().string() + " is empty");
        check.expect(a == b, first.artifacts[i].filename().string() + " differs");
        bytes += a.size();
    }
    for (const auto* f : {"corpus.jsonl", "queries.tsv", "qrels.tsv"}) {
        check.expect(read_file(work / "pipeline_1" / "bench" / f) == read_file(work / "pipeline_2" / "bench" / f),
                     std::string(f) + " differs");
    }
    check.note(std::to_string(first.artifacts.size()) + " run, weight and report files (" + std::to_string(bytes) +
               " bytes) identical");
    return check.outcome();
}

// ---- 8. cross-validation protocol ----------------------------------------------

Outcome fold_protocol() {
    Checker check;
    BenchmarkSpec spec;
    spec.seed = 3;
    spec.num_facts = 25;
    spec.num_entities = 100;
    spec.num_docs = 200;
    auto bench = generate_benchmark(spec);
    check.expect(bench.queries.size() == 25, "expected 25 queries");
    auto set = build_index_set(bench.corpus);
    ScoringParams params;
    auto lm = build_training_instances(bench.queries, bench.qrels, set, params, Retrieval::lm, 20000);
    auto bm = build_training_instances(bench.queries, bench.qrels, set, params, Retrieval::bm25, 20000);
    const std::uint64_t seed = 5;
    auto cv_lm = cross_validate(lm, 5, seed);
    auto cv_bm = cross_validate(bm, 5, seed);
    check.expect(cv_lm.folds.size() == 5, "expected 5 folds");
    std::set<std::string> covered;
    for (std::size_t f = 0; f < cv_lm.assignment.test_queries.size(); ++f) {
        const auto& test = cv_lm.assignment.test_queries[f];
        check.expect(test.size() == 5, "fold " + std::to_string(f) + " has " + std::to_string(test.size()) + " queries");
        covered.insert(test.begin(), test.end());
    }
    check.expect(covered.size() == 25, "folds do not partition the queries");
    for (const auto& fr : cv_lm.folds) {
        check.expect(fr.test.evaluated() + fr.test.flagged.size() == 5, "fold report size");
    }
    check.expect(cv_lm.assignment.fold_of == cv_bm.assignment.fold_of, "folds differ between models");
    std::vector<std::string> ids;
    for (const auto& q : bench.queries) {
        ids.push_back(q.id());
    }
    check.expect(assign_folds(ids, 5, seed).fold_of == cv_lm.assignment.fold_of, "folds not fixed by the seed");
    check.expect(assign_folds(ids, 5, seed + 1).fold_of != cv_lm.assignment.fold_of, "seed has no effect");
    check.note("5 folds x 5 queries; macro MAP ERDM-LM " + fmt(cv_lm.map) + ", ERDM-BM25 " + fmt(cv_bm.map) +
               ", P@10 " + fmt(cv_lm.p10) + ", MRR " + fmt(cv_lm.mrr) + ", NDCG@20 " + fmt(cv_lm.ndcg20));
    return check.outcome();
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: erdm_acceptance <work-dir>\n";
        return 2;
    }
    const fs::path work = argv[1];
    fs::remove_all(work);
    fs::create_directories(work);

    Pipeline first;
    struct Criterion {
        int number;
        std::string name;
        double limit_seconds;  // 0: no runtime bound
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "oracle scoring equivalence", 10, [&] { return oracle_equivalence(work); }},
        {2, "join correctness", 30, [] { return join_correctness(); }},
        {3, "EF/ERDM reduction", 0, [&] { return ef_reduction(work); }},
        {4, "metric correctness", 0, [&] { return metric_correctness(work); }},
        {5, "learning sanity", 0, [] { return learning_sanity(); }},
        {6, "method ordering", 300, [&] { return method_ordering(work, first); }},
        {7, "end-to-end determinism", 0, [&] { return determinism(work, first); }},
        {8, "5-fold protocol", 0, [] { return fold_protocol(); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0 && seconds >= c.limit_seconds) {
            o.pass = false;
            o.detail += "; runtime over " + fmt(c.limit_seconds, 0) + " s";
        }
        failed += o.pass ? 0 : 1;
        std::cout << "criterion " << c.number << ": " << (o.pass ? "PASS" : "FAIL") << " [" << c.name << "] ("
                  << fmt(seconds, 2) << " s) " << o.detail << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
