#include "erdm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "erdm/corpus.hpp"
#include "erdm/error.hpp"
#include "erdm/evaluation.hpp"
#include "erdm/index.hpp"
#include "erdm/learning.hpp"
#include "erdm/query.hpp"
#include "erdm/ranking.hpp"
#include "erdm/synth.hpp"

namespace erdm::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void require_file(const fs::path& path, const char* what) {
    if (!fs::is_regular_file(path)) {
        throw ValidationError(std::string(what) + " not found: " + path.string());
    }
}

ScoringParams load_params(const std::string& path, unsigned window) {
    ScoringParams params;
    if (!path.empty()) {
        require_file(path, "params file");
        params = ScoringParams::load(path);
    } else {
        params.window = window;
    }
    params.validate();
    return params;
}

Retrieval retrieval_of(Model model) {
    return model == Model::ef_bm25 || model == Model::erdm_bm25 ? Retrieval::bm25 : Retrieval::lm;
}

std::string folds_json(const FoldAssignment& assignment, std::uint64_t seed) {
    json j;
    j["folds"] = assignment.folds;
    j["seed"] = seed;
    j["test_queries"] = assignment.test_queries;
    return j.dump(2) + "\n";
}

FoldAssignment parse_folds_json(const std::string& text, const fs::path& path) {
    FoldAssignment a;
    try {
        auto j = json::parse(text);
        a.folds = j.at("folds").get<std::size_t>();
        a.test_queries = j.at("test_queries").get<std::vector<std::vector<std::string>>>();
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (a.test_queries.size() != a.folds) {
        throw ParseError(path.string() + ": fold count does not match test_queries");
    }
    for (std::size_t f = 0; f < a.folds; ++f) {
        for (const auto& q : a.test_queries[f]) {
            if (!a.fold_of.emplace(q, f).second) {
                throw ParseError(path.string() + ": query " + q + " appears in two folds");
            }
        }
    }
    return a;
}

/// Weights for each query: a single file applies to all queries; a training
/// directory applies fold_<i>.json to the test queries of fold i.
class WeightSource {
  public:
    explicit WeightSource(const std::string& path) {
        if (path.empty()) {
            return;
        }
        fs::path p(path);
        if (fs::is_directory(p)) {
            require_file(p / "folds.json", "folds file");
            folds_ = parse_folds_json(read_text(p / "folds.json"), p / "folds.json");
            for (std::size_t f = 0; f < folds_->folds; ++f) {
                auto file = p / ("fold_" + std::to_string(f) + ".json");
                require_file(file, "fold weights");
                per_fold_.push_back(LambdaWeights::load(file));
            }
            if (fs::is_regular_file(p / "weights.json")) {
                single_ = LambdaWeights::load(p / "weights.json");
            }
        } else {
            require_file(p, "weights file");
            single_ = LambdaWeights::load(p);
        }
    }

    LambdaWeights for_query(const std::string& query_id) const {
        if (folds_) {
            auto it = folds_->fold_of.find(query_id);
            if (it != folds_->fold_of.end()) {
                return per_fold_[it->second];
            }
        }
        return single_ ? *single_ : LambdaWeights();
    }

  private:
    std::optional<FoldAssignment> folds_;
    std::vector<LambdaWeights> per_fold_;
    std::optional<LambdaWeights> single_;
};

template <class Fn>
auto parallel_map(std::size_t n, std::size_t threads, Fn fn) {
    using T = decltype(fn(std::size_t{0}));
    std::vector<T> results(n);
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            results[i] = fn(i);
        }
        return results;
    }
    std::vector<std::future<void>> workers;
    for (std::size_t t = 0; t < threads; ++t) {
        workers.push_back(std::async(std::launch::async, [&, t] {
            for (std::size_t i = t; i < n; i += threads) {
                results[i] = fn(i);
            }
        }));
    }
    for (auto& w : workers) {
        w.get();
    }
    return results;
}

std::string metadoc_report(const MetaDoc& doc, const CollectionStats& stats, std::size_t top) {
    std::ostringstream out;
    out << "key\t" << doc.key << '\n'
        << "length\t" << doc.length << '\n'
        << "extractions\t" << doc.extractions << '\n'
        << "source_docs\t" << doc.source_docs.size() << '\n'
        << "distinct_terms\t" << doc.tf.size() << '\n'
        << "distinct_ordered\t" << doc.tf_ordered.size() << '\n'
        << "distinct_window\t" << doc.tf_window.size() << '\n';
    std::vector<std::pair<std::string, Count>> terms(doc.tf.begin(), doc.tf.end());
    std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (terms.size() > top) {
        terms.resize(top);
    }
    for (const auto& [t, n] : terms) {
        out << "term\t" << t << '\t' << n << '\t' << CollectionStats::get(stats.cf, t) << '\n';
    }
    return out.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Entity-relationship search over annotated corpora", "erdm"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Print help for every command");

    // build-index
    auto* build = app.add_subcommand("build-index", "Build entity and relationship meta-document indexes");
    std::string corpus_path, index_out, dump_path;
    bool sentence_pairs = false;
    unsigned window = 8;
    std::size_t cap = 0;
    build->add_option("--corpus", corpus_path, "Annotated corpus (JSON lines)")->required();
    build->add_option("--out", index_out, "Output index directory")->required();
    build->add_option("--dump-extractions", dump_path, "Write every extraction as JSON lines");
    build->add_flag("--sentence-pairs", sentence_pairs, "Also build the full-sentence pair index");
    build->add_option("--window", window, "Unordered window size")->check(CLI::Range(2u, 1000u));
    build->add_option("--cap", cap, "Maximum extractions per meta-document (0 = no cap)");

    // gen-benchmark
    auto* gen = app.add_subcommand("gen-benchmark", "Generate a synthetic corpus with planted facts");
    BenchmarkSpec spec;
    std::string gen_out;
    gen->add_option("--seed", spec.seed)->required();
    gen->add_option("--facts", spec.num_facts)->required();
    gen->add_option("--entities", spec.num_entities)->required();
    gen->add_option("--docs", spec.num_docs)->required();
    gen->add_option("--out", gen_out)->required();
    gen->add_option("--noise", spec.noise_sentences, "Noise sentences per document");
    gen->add_option("--vocab", spec.vocab_size, "Noise vocabulary size");
    gen->add_option("--confounders", spec.confounders_per_fact);
    gen->add_option("--distractors", spec.distractors_per_fact);
    gen->add_option("--unnamed", spec.unnamed_partner_sentences);

    // search
    auto* search_cmd = app.add_subcommand("search", "Rank entity tuples for every query");
    std::string index_dir, queries_path, model_name_str, weights_path, params_path, run_out, tag;
    std::size_t k = 20000, cutoff = 100, threads = 1;
    search_cmd->add_option("--index", index_dir)->required();
    search_cmd->add_option("--queries", queries_path)->required();
    search_cmd->add_option("--model", model_name_str, "ef-lm, ef-bm25, erdm-lm, erdm-bm25, base-ee, base-e, base-r")
        ->required();
    search_cmd->add_option("--weights", weights_path, "Weights file, or a train output directory");
    search_cmd->add_option("--params", params_path, "Scoring parameters (JSON)");
    search_cmd->add_option("--k", k, "First-stage depth per sub-query");
    search_cmd->add_option("--cutoff", cutoff, "Tuples returned per query");
    search_cmd->add_option("--out", run_out, "Run file")->required();
    search_cmd->add_option("--tag", tag, "Run tag (defaults to the model name)");
    search_cmd->add_option("--threads", threads)->check(CLI::PositiveNumber);

    // train
    auto* train = app.add_subcommand("train", "Learn ERDM weights with cross-validation");
    std::string qrels_path, train_out;
    std::size_t folds = 5, restarts = 3;
    std::uint64_t seed = 0;
    train->add_option("--index", index_dir)->required();
    train->add_option("--queries", queries_path)->required();
    train->add_option("--qrels", qrels_path)->required();
    train->add_option("--model", model_name_str, "erdm-lm or erdm-bm25")->required();
    train->add_option("--folds", folds)->check(CLI::PositiveNumber);
    train->add_option("--seed", seed);
    train->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
    train->add_option("--k", k);
    train->add_option("--params", params_path);
    train->add_option("--threads", threads)->check(CLI::PositiveNumber);
    train->add_option("--out", train_out)->required();

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Score a run file against qrels");
    std::string run_path;
    bool per_query = false, run_only = false;
    eval->add_option("--run", run_path)->required();
    eval->add_option("--qrels", qrels_path)->required();
    eval->add_flag("--per-query", per_query);
    eval->add_flag("--run-queries-only", run_only, "Ignore qrels queries absent from the run");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "Print statistics of one meta-document");
    std::string entity_key, pair_key;
    std::size_t top = 20;
    bool use_sentence_pairs = false;
    inspect->add_option("--index", index_dir)->required();
    auto* entity_opt = inspect->add_option("--entity", entity_key);
    auto* pair_opt = inspect->add_option("--pair", pair_key, "A|B");
    entity_opt->excludes(pair_opt);
    inspect->add_flag("--sentence-pairs", use_sentence_pairs, "Look the pair up in the full-sentence index");
    inspect->add_option("--top", top, "Number of terms listed");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "erdm: " << e.what() << "\n\n";
        auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
        err << (sub != nullptr ? sub->help() : app.help());
        return 2;
    }

    try {
        if (build->parsed()) {
            require_file(corpus_path, "corpus");
            IndexSetOptions options;
            options.index.window = window;
            options.index.max_extractions_per_key = cap;
            options.sentence_pairs = sentence_pairs;
            if (!dump_path.empty()) {
                options.dump_extractions = dump_path;
            }
            auto corpus = load_corpus(corpus_path);
            auto indexes = build_index_set(corpus, options);
            indexes.save(index_out);
            out << "documents\t" << corpus.size() << '\n'
                << "entity_metadocs\t" << indexes.entities.size() << '\n'
                << "relationship_metadocs\t" << indexes.relationships.size() << '\n';
            if (indexes.sentence_pairs) {
                out << "sentence_pair_metadocs\t" << indexes.sentence_pairs->size() << '\n';
            }
        } else if (gen->parsed()) {
            auto benchmark = generate_benchmark(spec);
            write_benchmark(benchmark, gen_out);
            out << "documents\t" << benchmark.corpus.size() << '\n'
                << "queries\t" << benchmark.queries.size() << '\n';
        } else if (search_cmd->parsed()) {
            auto model = parse_model(model_name_str);
            require_file(queries_path, "queries file");
            auto queries = load_queries(queries_path);
            auto indexes = IndexSet::load(index_dir);
            SearchOptions options;
            options.k = k;
            options.cutoff = cutoff;
            options.params = load_params(params_path, indexes.entities.options().window);
            check_compatible(indexes, options.params);
            WeightSource weights(weights_path);
            if (!weights_path.empty() && !is_erdm(model)) {
                throw ValidationError("--weights only applies to erdm models");
            }
            auto ranked = parallel_map(queries.size(), threads, [&](std::size_t i) {
                auto opts = options;
                opts.weights = weights.for_query(queries[i].id());
                return search(queries[i], indexes, model, opts);
            });
            std::ostringstream run_text;
            auto run_tag = tag.empty() ? std::string(model_name(model)) : tag;
            for (std::size_t i = 0; i < queries.size(); ++i) {
                write_run(run_text, queries[i].id(), ranked[i], run_tag);
            }
            write_text(run_out, run_text.str());
        } else if (train->parsed()) {
            auto model = parse_model(model_name_str);
            if (!is_erdm(model)) {
                throw ValidationError("train needs an erdm model, got " + model_name_str);
            }
            require_file(queries_path, "queries file");
            require_file(qrels_path, "qrels file");
            auto queries = load_queries(queries_path);
            auto qrels = load_qrels(qrels_path, query_arities(queries));
            auto indexes = IndexSet::load(index_dir);
            auto params = load_params(params_path, indexes.entities.options().window);
            check_compatible(indexes, params);
            auto instances = build_training_instances(queries, qrels, indexes, params, retrieval_of(model), k);
            AscentOptions ascent;
            ascent.restarts = restarts;
            ascent.seed = seed;
            ascent.threads = threads;
            auto cv = cross_validate(instances, folds, seed, ascent);
            auto full = coordinate_ascent(instances, ascent);

            fs::path dir(train_out);
            fs::create_directories(dir);
            full.weights.save(dir / "weights.json");
            for (const auto& fr : cv.folds) {
                fr.weights.save(dir / ("fold_" + std::to_string(fr.fold) + ".json"));
            }
            write_text(dir / "folds.json", folds_json(cv.assignment, seed));
            std::ostringstream report;
            report << "fold\ttrain_map\tmap@100\tp@10\tmrr\tndcg@20\tqueries\n";
            for (const auto& fr : cv.folds) {
                report << fr.fold << '\t' << format_double(fr.train_map) << '\t' << format_double(fr.test.map)
                       << '\t' << format_double(fr.test.p10) << '\t' << format_double(fr.test.mrr) << '\t'
                       << format_double(fr.test.ndcg20) << '\t' << fr.test.evaluated() << '\n';
            }
            report << "mean\t-\t" << format_double(cv.map) << '\t' << format_double(cv.p10) << '\t'
                   << format_double(cv.mrr) << '\t' << format_double(cv.ndcg20) << '\t' << instances.size() << '\n';
            write_text(dir / "cv_report.tsv", report.str());
            out << report.str();
        } else if (eval->parsed()) {
            require_file(run_path, "run file");
            require_file(qrels_path, "qrels file");
            EvaluateOptions options;
            options.run_queries_only = run_only;
            out << format_report(evaluate_run(run_path, qrels_path, options), per_query);
        } else if (inspect->parsed()) {
            if (entity_key.empty() && pair_key.empty()) {
                throw ValidationError("inspect needs --entity or --pair");
            }
            auto indexes = IndexSet::load(index_dir);
            const MetaDocIndex* index = &indexes.entities;
            std::string key = entity_key;
            if (!pair_key.empty()) {
                index = &indexes.relationships;
                if (use_sentence_pairs) {
                    if (!indexes.sentence_pairs) {
                        throw ValidationError("index " + index_dir + " has no sentence-pair index");
                    }
                    index = &*indexes.sentence_pairs;
                }
                key = EntityPair::from_key(pair_key).key();
            }
            const auto* doc = index->lookup(key);
            if (doc == nullptr) {
                throw ValidationError("no meta-document for key " + key);
            }
            out << metadoc_report(*doc, index->stats(), top);
        }
    } catch (const std::exception& e) {
        err << "erdm: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args, std::cout, std::cerr);
}

}  // namespace erdm::cli
