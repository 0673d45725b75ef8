#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "linktrail/bgp_eval.hpp"
#include "linktrail/engine.hpp"
#include "linktrail/rng.hpp"
#include "linktrail/testweb.hpp"
#include "linktrail/webmodel.hpp"

namespace linktrail::testing {

inline Term ent(int i) { return uri("http://ex.org/e" + std::to_string(i)); }
inline Term pred(int i) { return uri("http://ex.org/p" + std::to_string(i)); }
inline Term lit(int i) { return literal("v" + std::to_string(i)); }

/// Random base dataset over n_entities subjects; URI objects always point
/// at entities so base validation holds by construction.
inline BaseDataset random_base(SplitMix64& rng, int n_entities, int n_predicates, int n_triples) {
    std::set<Triple> triples;
    for (int e = 0; e < n_entities; ++e) {
        // anchor triple so every entity occurs as a subject
        triples.insert(Triple{ent(e), pred(0), lit(static_cast<int>(rng.next() % 4))});
    }
    for (int i = 0; i < n_triples; ++i) {
        Term s = ent(static_cast<int>(rng.next() % n_entities));
        Term p = pred(static_cast<int>(rng.next() % n_predicates));
        Term o = rng.next_unit() < 0.25 ? lit(static_cast<int>(rng.next() % 4))
                                        : ent(static_cast<int>(rng.next() % n_entities));
        triples.insert(Triple{std::move(s), std::move(p), std::move(o)});
    }
    return make_base_dataset(std::move(triples));
}

/// Random connected BGP over the dataset's vocabulary: the first pattern
/// anchors on a constant entity, later patterns share a variable with an
/// earlier one.
inline BGPQuery random_query(SplitMix64& rng, const BaseDataset& base, int max_patterns) {
    std::vector<Term> entities(base.entity_uris.begin(), base.entity_uris.end());
    std::set<Term> predicate_set;
    for (const Triple& t : base.triples) predicate_set.insert(t.p);
    std::vector<Term> predicates(predicate_set.begin(), predicate_set.end());

    auto pick = [&](const std::vector<Term>& pool) { return pool[rng.next() % pool.size()]; };
    auto var = [](int i) { return Variable{"v" + std::to_string(i)}; };

    const int n = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_patterns));
    std::vector<TriplePattern> patterns;
    int n_vars = 0;

    {
        TriplePattern tp;
        tp.p = pick(predicates);
        if (rng.next() % 2 == 0) {
            tp.s = pick(entities);
            tp.o = var(n_vars++);
        } else {
            tp.s = var(n_vars++);
            tp.o = pick(entities);
        }
        patterns.push_back(std::move(tp));
    }
    for (int i = 1; i < n; ++i) {
        TriplePattern tp;
        Variable join = var(static_cast<int>(rng.next() % static_cast<std::uint64_t>(n_vars)));
        tp.p = rng.next_unit() < 0.1 ? PatternTerm{var(n_vars++)} : PatternTerm{pick(predicates)};
        switch (rng.next() % 4) {
            case 0:
                tp.s = join;
                tp.o = var(n_vars++);
                break;
            case 1:
                tp.s = var(n_vars++);
                tp.o = join;
                break;
            case 2:
                tp.s = join;
                tp.o = pick(entities);
                break;
            default:
                tp.s = join;
                tp.o = lit(static_cast<int>(rng.next() % 4));
                break;
        }
        patterns.push_back(std::move(tp));
    }
    return make_query(std::move(patterns));
}

inline std::vector<std::string> engine_multiset_keys(const std::vector<Solution>& solutions) {
    std::vector<std::string> keys;
    keys.reserve(solutions.size());
    for (const Solution& s : solutions) keys.push_back(mapping_key(s.mapping));
    std::sort(keys.begin(), keys.end());
    return keys;
}

/// One randomized (web, query) instance; configs cycle through the
/// standard suite.
struct Instance {
    WebOfLinkedData web;
    BGPQuery query;
    TestWebConfig cfg;
};

inline Instance random_instance(SplitMix64& rng, int index, int max_entities = 14, int max_patterns = 4) {
    auto suite = standard_config_suite();
    TestWebConfig cfg = suite[static_cast<std::size_t>(index) % suite.size()];
    cfg.seed = rng.next();

    const int n_entities = 4 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_entities - 3));
    BaseDataset base = random_base(rng, n_entities, 3, 3 * n_entities);
    Instance inst{generate_testweb(base, cfg), random_query(rng, base, max_patterns), cfg};
    inst.web.latency = LatencyModel{2, 3, cfg.seed};
    return inst;
}

}  // namespace linktrail::testing
