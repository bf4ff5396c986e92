#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "erdm/error.hpp"
#include "erdm/evaluation.hpp"
#include "erdm/index.hpp"
#include "erdm/learning.hpp"
#include "erdm/query.hpp"
#include "erdm/ranking.hpp"
#include "erdm/synth.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace erdm;

namespace {

using WeightMap = std::map<std::string, double>;

LambdaWeights to_weights(const std::optional<WeightMap>& weights) {
    if (!weights) {
        return LambdaWeights();
    }
    FeatureVector values{};
    for (const auto& [name, w] : *weights) {
        bool known = false;
        for (std::size_t i = 0; i < num_features; ++i) {
            if (feature_names[i] == name) {
                values[i] = w;
                known = true;
            }
        }
        if (!known) {
            throw ValidationError("unknown feature name " + name);
        }
    }
    return LambdaWeights(values);
}

WeightMap from_weights(const LambdaWeights& weights) {
    WeightMap out;
    for (std::size_t i = 0; i < num_features; ++i) {
        out[std::string(feature_names[i])] = weights.values()[i];
    }
    return out;
}

ScoringParams make_params(std::optional<double> mu_entity, std::optional<double> mu_relationship, double k1,
                          double b, double alpha, unsigned window) {
    ScoringParams p;
    p.mu_entity = mu_entity;
    p.mu_relationship = mu_relationship;
    p.k1 = k1;
    p.b = b;
    p.alpha = alpha;
    p.window = window;
    p.validate();
    return p;
}

ERQuery to_query(const std::vector<std::string>& parts, const std::string& id) {
    std::string line = id;
    for (const auto& p : parts) {
        line += '\t' + p;
    }
    return parse_query(line);
}

py::dict metrics_dict(const MetricReport& r) {
    py::dict d;
    d["map"] = r.map;
    d["p10"] = r.p10;
    d["mrr"] = r.mrr;
    d["ndcg20"] = r.ndcg20;
    d["queries"] = r.evaluated();
    d["flagged"] = r.flagged;
    py::dict per_query;
    for (const auto& m : r.per_query) {
        py::dict q;
        q["map"] = m.map;
        q["p10"] = m.p10;
        q["mrr"] = m.mrr;
        q["ndcg20"] = m.ndcg20;
        per_query[py::str(m.query_id)] = q;
    }
    d["per_query"] = per_query;
    return d;
}

Judgments to_judgments(const std::map<std::string, int>& grades) {
    Judgments j;
    for (const auto& [key, g] : grades) {
        j[canonical_tuple(parse_tuple(key))] = g;
    }
    return j;
}

std::vector<EntityTuple> to_ranking(const std::vector<std::string>& keys) {
    std::vector<EntityTuple> out;
    for (const auto& k : keys) {
        out.push_back(parse_tuple(k));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_erdm, m) {
    m.doc() = "Entity-relationship retrieval with early fusion and ERDM ranking";

    auto base = py::register_exception<Error>(m, "ErdmError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());

    m.attr("feature_names") = std::vector<std::string>(feature_names.begin(), feature_names.end());
    m.attr("models") = std::vector<std::string>{"ef-lm", "ef-bm25", "erdm-lm", "erdm-bm25", "base-ee", "base-e",
                                                "base-r"};

    py::class_<ScoringParams>(m, "ScoringParams")
        .def(py::init(&make_params), py::kw_only(), py::arg("mu_entity") = py::none(),
             py::arg("mu_relationship") = py::none(), py::arg("k1") = 1.2, py::arg("b") = 0.75,
             py::arg("alpha") = 0.1, py::arg("window") = 8u)
        .def_readonly("mu_entity", &ScoringParams::mu_entity)
        .def_readonly("mu_relationship", &ScoringParams::mu_relationship)
        .def_readonly("k1", &ScoringParams::k1)
        .def_readonly("b", &ScoringParams::b)
        .def_readonly("alpha", &ScoringParams::alpha)
        .def_readonly("window", &ScoringParams::window);

    py::class_<IndexSet>(m, "Index")
        .def_static(
            "build",
            [](const fs::path& corpus, bool sentence_pairs, unsigned window, std::size_t cap) {
                IndexSetOptions options;
                options.sentence_pairs = sentence_pairs;
                options.index.window = window;
                options.index.max_extractions_per_key = cap;
                auto docs = load_corpus(corpus);
                py::gil_scoped_release release;
                return build_index_set(docs, options);
            },
            py::arg("corpus"), py::kw_only(), py::arg("sentence_pairs") = false, py::arg("window") = 8u,
            py::arg("cap") = 0)
        .def_static("load", &IndexSet::load, py::arg("path"))
        .def("save", &IndexSet::save, py::arg("path"))
        .def_property_readonly("num_entities", [](const IndexSet& s) { return s.entities.size(); })
        .def_property_readonly("num_relationships", [](const IndexSet& s) { return s.relationships.size(); })
        .def_property_readonly("has_sentence_pairs", [](const IndexSet& s) { return s.sentence_pairs.has_value(); })
        .def(
            "search",
            [](const IndexSet& s, const std::vector<std::string>& parts, const std::string& model,
               std::optional<WeightMap> weights, std::optional<ScoringParams> params, std::size_t k,
               std::size_t cutoff) {
                SearchOptions options;
                options.k = k;
                options.cutoff = cutoff;
                options.params = params.value_or(ScoringParams{});
                options.params.window = params ? params->window : s.entities.options().window;
                options.weights = to_weights(weights);
                auto m = parse_model(model);
                if (weights && !is_erdm(m)) {
                    throw ValidationError("weights only apply to erdm models");
                }
                check_compatible(s, options.params);
                auto query = to_query(parts, "Q");
                std::vector<ScoredTuple> ranked;
                {
                    py::gil_scoped_release release;
                    ranked = search(query, s, m, options);
                }
                std::vector<std::pair<std::vector<std::string>, double>> out;
                for (const auto& r : ranked) {
                    out.emplace_back(r.tuple, r.total);
                }
                return out;
            },
            py::arg("parts"), py::arg("model") = "erdm-lm", py::kw_only(), py::arg("weights") = py::none(),
            py::arg("params") = py::none(), py::arg("k") = 20000, py::arg("cutoff") = 100,
            "Rank entity tuples for one query given as its alternating entity and relationship parts.");

    m.def(
        "train",
        [](const IndexSet& s, const fs::path& queries, const fs::path& qrels, const std::string& model,
           std::size_t folds, std::uint64_t seed, std::size_t restarts, std::size_t k) {
            auto m = parse_model(model);
            if (!is_erdm(m)) {
                throw ValidationError("train needs an erdm model, got " + model);
            }
            auto qs = load_queries(queries);
            auto judged = load_qrels(qrels, query_arities(qs));
            ScoringParams params;
            params.window = s.entities.options().window;
            AscentOptions ascent;
            ascent.restarts = restarts;
            ascent.seed = seed;
            CrossValidationResult cv;
            AscentResult full;
            {
                py::gil_scoped_release release;
                auto instances = build_training_instances(
                    qs, judged, s, params, m == Model::erdm_lm ? Retrieval::lm : Retrieval::bm25, k);
                cv = cross_validate(instances, folds, seed, ascent);
                full = coordinate_ascent(instances, ascent);
            }
            py::dict out;
            out["weights"] = from_weights(full.weights);
            out["train_map"] = full.train_map;
            out["cv_map"] = cv.map;
            out["cv_p10"] = cv.p10;
            out["cv_mrr"] = cv.mrr;
            out["cv_ndcg20"] = cv.ndcg20;
            out["folds"] = cv.assignment.test_queries;
            std::vector<WeightMap> fold_weights;
            for (const auto& f : cv.folds) {
                fold_weights.push_back(from_weights(f.weights));
            }
            out["fold_weights"] = fold_weights;
            return out;
        },
        py::arg("index"), py::arg("queries"), py::arg("qrels"), py::kw_only(), py::arg("model") = "erdm-lm",
        py::arg("folds") = 5, py::arg("seed") = 0, py::arg("restarts") = 3, py::arg("k") = 20000,
        "Cross-validate and fit ERDM weights on a query file and its qrels.");

    m.def(
        "evaluate",
        [](const fs::path& run, const fs::path& qrels, bool run_queries_only) {
            return metrics_dict(evaluate_run(run, qrels, EvaluateOptions{run_queries_only}));
        },
        py::arg("run"), py::arg("qrels"), py::kw_only(), py::arg("run_queries_only") = false);

    m.def(
        "query_metrics",
        [](const std::vector<std::string>& ranking, const std::map<std::string, int>& grades) {
            auto r = to_ranking(ranking);
            auto j = to_judgments(grades);
            py::dict d;
            d["ap"] = average_precision(r, j);
            d["p10"] = precision_at(r, j);
            d["rr"] = reciprocal_rank(r, j);
            d["ndcg20"] = ndcg_at(r, j);
            return d;
        },
        py::arg("ranking"), py::arg("grades"),
        "Metrics of one ranked list of 'A|B' keys against grades keyed the same way.");

    m.def(
        "generate_benchmark",
        [](const fs::path& out, std::uint64_t seed, std::size_t facts, std::size_t entities, std::size_t docs,
           std::size_t noise) {
            BenchmarkSpec spec;
            spec.seed = seed;
            spec.num_facts = facts;
            spec.num_entities = entities;
            spec.num_docs = docs;
            spec.noise_sentences = noise;
            auto b = generate_benchmark(spec);
            write_benchmark(b, out);
            py::dict d;
            d["documents"] = b.corpus.size();
            d["queries"] = b.queries.size();
            return d;
        },
        py::arg("out"), py::kw_only(), py::arg("seed") = 1, py::arg("facts") = 50, py::arg("entities") = 200,
        py::arg("docs") = 500, py::arg("noise") = 3);
}
