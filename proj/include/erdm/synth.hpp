#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "erdm/corpus.hpp"
#include "erdm/query.hpp"

namespace erdm {

/// Parameters of a synthetic corpus with planted entity-relationship facts.
struct BenchmarkSpec {
    std::uint64_t seed = 1;
    std::size_t num_entities = 200;
    std::size_t num_facts = 50;
    std::size_t num_docs = 500;
    std::size_t vocab_size = 400;
    /// Random-vocabulary sentences added to every document.
    std::size_t noise_sentences = 3;
    /// Descriptor sentences per entity.
    std::size_t descriptor_sentences = 2;
    /// Sentences stating each planted fact.
    std::size_t fact_sentences = 2;
    /// Per fact and side: sentences stating the relation with the partner
    /// described by its type but not named.
    std::size_t unnamed_partner_sentences = 1;
    /// Per fact: sentences co-mentioning two other entities of the same
    /// types with the relation words outside the separating string.
    std::size_t confounders_per_fact = 1;
    /// Per fact: sentences using the fact's relation between a hub entity of
    /// one of its types and a partner of a type matching no planted fact.
    std::size_t distractors_per_fact = 6;

    void validate() const;
};

struct PlantedFact {
    EntityId subject;
    std::string relation;
    EntityId object;
};

struct Benchmark {
    std::vector<AnnotatedDocument> corpus;
    std::vector<ERQuery> queries;
    Qrels qrels;
    std::vector<PlantedFact> facts;
};

/// Deterministic under the seed. Each fact yields a query
/// (descriptor of subject, relation, descriptor of object); every planted
/// fact with the same unordered type signature and relation is relevant.
Benchmark generate_benchmark(const BenchmarkSpec& spec);

/// Writes corpus.jsonl, queries.tsv and qrels.tsv into `dir`.
void write_benchmark(const Benchmark& benchmark, const std::filesystem::path& dir);

}  // namespace erdm
