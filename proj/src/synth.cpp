#include "erdm/synth.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <set>
#include <string_view>
#include <variant>

#include "erdm/error.hpp"
#include "erdm/rng.hpp"
#include "erdm/text.hpp"

namespace erdm {

namespace {

// Per entity type: the canonical descriptor (used by queries) first, then
// alternative phrasings that only some sentences use.
constexpr std::array<std::array<std::string_view, 3>, 16> descriptor_pool = {{
    {"soccer player", "footballer", "striker"},
    {"top model", "supermodel", "catwalk star"},
    {"film director", "filmmaker", "movie auteur"},
    {"rock band", "guitar group", "metal quartet"},
    {"record label", "music publisher", "recording imprint"},
    {"tech company", "software firm", "internet startup"},
    {"football club", "soccer team", "league side"},
    {"university professor", "academic", "scholar"},
    {"political party", "parliamentary faction", "opposition movement"},
    {"news anchor", "television presenter", "broadcaster"},
    {"tennis player", "grand slam champion", "racquet ace"},
    {"fashion brand", "couture house", "clothing label"},
    {"race driver", "motorsport pilot", "rally champion"},
    {"opera singer", "soprano", "baritone"},
    {"car maker", "automobile manufacturer", "vehicle producer"},
    {"science journal", "research periodical", "scholarly magazine"},
}};

constexpr std::array<std::string_view, 12> relation_pool = {
    "dated",    "signed a contract with", "was coached by",         "founded",
    "sued",     "acquired",               "married",                "played for",
    "produced an album with", "criticized", "sponsored",            "interviewed",
};

constexpr std::array<std::string_view, 14> onsets = {"b", "d", "f", "g", "k", "l", "m",
                                                     "n", "p", "r", "s", "t", "v", "z"};
constexpr std::array<std::string_view, 5> nuclei = {"a", "e", "i", "o", "u"};
constexpr std::array<std::string_view, 4> codas = {"", "n", "r", "l"};

struct Mention {
    EntityId id;
};
using Piece = std::variant<std::string, Mention>;
using Sentence = std::vector<Piece>;

class WordFactory {
  public:
    explicit WordFactory(SeededRng& rng) : rng_(rng) {
        for (const auto& phrases : descriptor_pool) {
            for (auto phrase : phrases) {
                reserve(phrase);
            }
        }
        for (auto phrase : relation_pool) {
            reserve(phrase);
        }
        for (std::string_view w : {"the", "a", "and", "is", "well", "known", "last", "year",
                                   "said", "that", "nobody", "anyone", "then", "met"}) {
            used_.emplace(w);
        }
    }

    std::string fresh(std::size_t syllables) {
        for (;;) {
            std::string w;
            for (std::size_t i = 0; i < syllables; ++i) {
                w += rng_.pick(onsets);
                w += rng_.pick(nuclei);
                w += rng_.pick(codas);
            }
            if (used_.insert(w).second) {
                return w;
            }
        }
    }

  private:
    void reserve(std::string_view phrase) {
        for (auto& t : tokenize(phrase)) {
            used_.insert(t);
        }
    }

    SeededRng& rng_;
    std::set<std::string> used_;
};

std::string capitalized(std::string w) {
    if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') {
        w[0] = static_cast<char>(w[0] - 'a' + 'A');
    }
    return w;
}

struct Entity {
    EntityId id;
    std::string name;
    std::size_t type = 0;
};

std::pair<std::size_t, std::size_t> unordered(std::size_t a, std::size_t b) {
    return {std::min(a, b), std::max(a, b)};
}

void append(AnnotatedDocument& doc, const Sentence& sentence,
            const std::map<EntityId, std::string>& names) {
    if (!doc.text.empty()) {
        doc.text += ' ';
    }
    std::size_t pos = utf8_length(doc.text);
    for (const auto& piece : sentence) {
        if (const auto* text = std::get_if<std::string>(&piece)) {
            doc.text += *text;
            pos += utf8_length(*text);
        } else {
            const auto& id = std::get<Mention>(piece).id;
            const auto& name = names.at(id);
            doc.text += name;
            doc.mentions.push_back({id, pos, pos + utf8_length(name)});
            pos += utf8_length(name);
        }
    }
}

SubQuery part(PartKind kind, std::string_view text) {
    return {kind, std::string(text), tokenize(text)};
}

}  // namespace

void BenchmarkSpec::validate() const {
    if (num_facts < 1) {
        throw ValidationError("benchmark needs at least one fact");
    }
    if (num_entities < 2) {
        throw ValidationError("benchmark needs at least two entities");
    }
    if (num_docs < 1) {
        throw ValidationError("benchmark needs at least one document");
    }
    if (fact_sentences < 1) {
        throw ValidationError("every fact needs at least one sentence");
    }
    auto types = std::min(num_entities, descriptor_pool.size());
    auto signatures = types * (types - 1) / 2 * relation_pool.size();
    if (num_facts > signatures) {
        throw ValidationError("num_facts " + std::to_string(num_facts) + " exceeds the "
                              + std::to_string(signatures) + " distinct fact signatures available for "
                              + std::to_string(num_entities) + " entities");
    }
}

Benchmark generate_benchmark(const BenchmarkSpec& spec) {
    spec.validate();
    SeededRng rng(spec.seed);
    WordFactory words(rng);

    const std::size_t num_types = std::min(spec.num_entities, descriptor_pool.size());
    std::vector<Entity> entities;
    std::vector<std::vector<std::size_t>> by_type(num_types);
    std::map<EntityId, std::string> names;
    const int width = spec.num_entities < 10000 ? 4 : 8;
    for (std::size_t i = 0; i < spec.num_entities; ++i) {
        Entity e;
        auto digits = std::to_string(i + 1);
        e.id = "E" + std::string(static_cast<std::size_t>(width) - std::min<std::size_t>(width, digits.size()), '0') + digits;
        e.name = capitalized(words.fresh(2)) + " " + capitalized(words.fresh(2));
        e.type = i % num_types;
        by_type[e.type].push_back(entities.size());
        names[e.id] = e.name;
        entities.push_back(std::move(e));
    }
    std::vector<std::string> vocab;
    for (std::size_t i = 0; i < spec.vocab_size; ++i) {
        vocab.push_back(words.fresh(1 + rng.below(2)));
    }

    // Facts with pairwise distinct (unordered type pair, relation) signatures.
    Benchmark out;
    std::set<std::pair<std::pair<std::size_t, std::size_t>, std::size_t>> signatures;
    struct Fact {
        std::size_t a, b, relation;
    };
    std::vector<Fact> facts;
    while (facts.size() < spec.num_facts) {
        auto ta = static_cast<std::size_t>(rng.below(num_types));
        auto tb = static_cast<std::size_t>(rng.below(num_types));
        auto rel = static_cast<std::size_t>(rng.below(relation_pool.size()));
        if (ta == tb || !signatures.insert({unordered(ta, tb), rel}).second) {
            continue;
        }
        facts.push_back({by_type[ta][rng.below(by_type[ta].size())],
                         by_type[tb][rng.below(by_type[tb].size())], rel});
    }

    std::vector<Sentence> sentences;
    auto lit = [](std::string_view s) { return Piece(std::string(s)); };
    auto ment = [&](std::size_t e) { return Piece(Mention{entities[e].id}); };
    auto desc = [&](std::size_t e) { return std::string(descriptor_pool[entities[e].type][0]); };
    auto any_desc = [&](std::size_t e) { return std::string(rng.pick(descriptor_pool[entities[e].type])); };
    // Trailing clause of 0-3 noise words, so sentence lengths vary.
    auto tail = [&](std::string_view end) {
        std::string s;
        for (auto n = rng.below(4); n > 0; --n) {
            s += " " + rng.pick(vocab);
        }
        return s + std::string(end);
    };

    for (std::size_t e = 0; e < entities.size(); ++e) {
        for (std::size_t k = 0; k < spec.descriptor_sentences; ++k) {
            if (k % 2 == 0) {
                sentences.push_back({ment(e), lit(" is a well known " + desc(e) + ".")});
            } else {
                sentences.push_back({lit("The " + any_desc(e) + " "), ment(e), lit(" met " + rng.pick(vocab) + " " + rng.pick(vocab) + ".")});
            }
        }
    }

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> hubs;
    for (std::size_t f = 0; f < facts.size(); ++f) {
        const auto& fact = facts[f];
        const std::string rel(relation_pool[fact.relation]);
        for (std::size_t k = 0; k < spec.fact_sentences; ++k) {
            auto da = k == 0 ? desc(fact.a) : any_desc(fact.a);
            auto db = k == 0 ? desc(fact.b) : any_desc(fact.b);
            sentences.push_back({lit("The " + da + " "), ment(fact.a), lit(" " + rel + " "), ment(fact.b),
                                 lit(", a " + db + tail("."))});
        }
        // The relation stated with only one side named.
        for (std::size_t k = 0; k < spec.unnamed_partner_sentences; ++k) {
            sentences.push_back({lit("The " + any_desc(fact.a) + " "), ment(fact.a),
                                 lit(" " + rel + " a " + any_desc(fact.b) + tail(" again."))});
            sentences.push_back({lit("A " + any_desc(fact.a) + " " + rel + " the " + any_desc(fact.b) + " "),
                                 ment(fact.b), lit(tail("."))});
        }
        // Same entity types, relation words outside the separating string.
        const auto& pool_a = by_type[entities[fact.a].type];
        const auto& pool_b = by_type[entities[fact.b].type];
        for (std::size_t k = 0; k < spec.confounders_per_fact; ++k) {
            auto x = pool_a[rng.below(pool_a.size())];
            auto y = pool_b[rng.below(pool_b.size())];
            if ((x == fact.a && y == fact.b) || x == y) {
                continue;
            }
            for (std::size_t r = 0; r < spec.fact_sentences; ++r) {
                sentences.push_back({lit("The " + desc(x) + " "), ment(x), lit(" and " + desc(y) + " "), ment(y),
                                     lit(" both " + rel + tail(" it."))});
            }
        }
        // Popular entities attract most mentions of a relation: each
        // (type, relation) has one hub entity that states the relation with
        // partners of types forming no planted signature with it.
        for (std::size_t k = 0; k < spec.distractors_per_fact; ++k) {
            const auto anchor_type = entities[k % 2 == 0 ? fact.a : fact.b].type;
            const auto& anchor_pool = by_type[anchor_type];
            auto [hub_it, fresh] = hubs.try_emplace({anchor_type, fact.relation}, 0);
            if (fresh) {
                hub_it->second = anchor_pool[rng.below(anchor_pool.size())];
            }
            for (int attempt = 0; attempt < 32; ++attempt) {
                auto p = hub_it->second;
                auto q = static_cast<std::size_t>(rng.below(entities.size()));
                if (entities[p].type == entities[q].type
                    || signatures.count({unordered(entities[p].type, entities[q].type), fact.relation}) > 0) {
                    continue;
                }
                if (k % 2 == 1) {
                    std::swap(p, q);
                }
                sentences.push_back({ment(p), lit(" " + rel + " "), ment(q), lit(tail(" last year."))});
                break;
            }
        }
        PlantedFact planted{entities[fact.a].id, rel, entities[fact.b].id};
        auto qid = "Q" + std::string(f + 1 < 10 ? "00" : f + 1 < 100 ? "0" : "") + std::to_string(f + 1);
        out.queries.emplace_back(qid, std::vector<SubQuery>{part(PartKind::entity, desc(fact.a)),
                                                            part(PartKind::relationship, rel),
                                                            part(PartKind::entity, desc(fact.b))});
        out.qrels[qid].push_back({qid, canonical_tuple({planted.subject, planted.object}), 1});
        out.facts.push_back(std::move(planted));
    }

    rng.shuffle(sentences);
    std::vector<std::vector<Sentence>> per_doc(spec.num_docs);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        per_doc[i % spec.num_docs].push_back(std::move(sentences[i]));
    }
    for (std::size_t d = 0; d < spec.num_docs; ++d) {
        auto& doc_sentences = per_doc[d];
        for (std::size_t k = 0; k < spec.noise_sentences; ++k) {
            Sentence noise;
            auto len = 4 + rng.below(6);
            auto mention_at = rng.chance(0.5) ? rng.below(len) : len;
            for (std::size_t w = 0; w < len; ++w) {
                std::string sep = w == 0 ? "" : " ";
                if (w == mention_at) {
                    if (!sep.empty()) {
                        noise.push_back(lit(sep));
                    }
                    noise.push_back(ment(rng.below(entities.size())));
                } else {
                    auto word = rng.pick(vocab);
                    noise.push_back(lit(sep + (w == 0 ? capitalized(word) : word)));
                }
            }
            noise.push_back(lit("."));
            auto at = rng.below(doc_sentences.size() + 1);
            doc_sentences.insert(doc_sentences.begin() + static_cast<std::ptrdiff_t>(at), std::move(noise));
        }
        if (doc_sentences.empty()) {
            continue;
        }
        AnnotatedDocument doc;
        auto digits = std::to_string(d + 1);
        doc.doc_id = "D" + std::string(digits.size() < 6 ? 6 - digits.size() : 0, '0') + digits;
        for (const auto& s : doc_sentences) {
            append(doc, s, names);
        }
        validate_document(doc);
        out.corpus.push_back(std::move(doc));
    }
    return out;
}

void write_benchmark(const Benchmark& benchmark, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_corpus(dir / "corpus.jsonl", benchmark.corpus);
    std::ofstream queries(dir / "queries.tsv", std::ios::binary);
    if (!queries) {
        throw Error("cannot write " + (dir / "queries.tsv").string());
    }
    for (const auto& q : benchmark.queries) {
        queries << format_query(q) << '\n';
    }
    write_qrels(dir / "qrels.tsv", benchmark.qrels);
}

}  // namespace erdm
