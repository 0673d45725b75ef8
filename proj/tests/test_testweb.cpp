#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "linktrail/ntriples.hpp"
#include "linktrail/testweb.hpp"

#include "support.hpp"

using namespace linktrail;
using namespace linktrail::testing;

namespace {

int docs_holding(const WebOfLinkedData& web, const Triple& t) {
    int n = 0;
    for (const auto& [u, d] : web.docs) n += d.triples.count(t) > 0 ? 1 : 0;
    return n;
}

/// naive O(V^3)-ish SCC count: mutual reachability by repeated DFS
std::size_t naive_scc_count(const std::set<Term>& verts, const std::set<std::pair<Term, Term>>& edges) {
    std::map<Term, std::set<Term>> adj;
    for (const auto& [a, b] : edges) adj[a].insert(b);
    auto reaches = [&](const Term& from, const Term& to) {
        std::set<Term> seen{from};
        std::vector<Term> stack{from};
        while (!stack.empty()) {
            Term v = stack.back();
            stack.pop_back();
            if (v == to) return true;
            for (const Term& w : adj[v]) {
                if (seen.insert(w).second) stack.push_back(w);
            }
        }
        return false;
    };
    std::vector<Term> order(verts.begin(), verts.end());
    std::vector<int> component(order.size(), -1);
    int next = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (component[i] != -1) continue;
        component[i] = next++;
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            if (component[j] == -1 && reaches(order[i], order[j]) && reaches(order[j], order[i])) {
                component[j] = component[i];
            }
        }
    }
    return static_cast<std::size_t>(next);
}

/// naive diameter: max finite pairwise BFS distance
std::int64_t naive_diameter(const std::set<Term>& verts, const std::set<std::pair<Term, Term>>& edges) {
    std::map<Term, std::set<Term>> adj;
    for (const auto& [a, b] : edges) adj[a].insert(b);
    std::int64_t best = 0;
    for (const Term& s : verts) {
        std::map<Term, std::int64_t> dist{{s, 0}};
        std::vector<Term> frontier{s};
        while (!frontier.empty()) {
            std::vector<Term> next;
            for (const Term& v : frontier) {
                for (const Term& w : adj[v]) {
                    if (dist.emplace(w, dist[v] + 1).second) next.push_back(w);
                }
            }
            frontier = std::move(next);
        }
        for (const auto& [v, d] : dist) best = std::max(best, d);
    }
    return best;
}

}  // namespace

TEST_CASE("base dataset validation") {
    CHECK_THROWS(make_base_dataset({Triple{literal("x"), pred(0), ent(0)}}));
    // URI object that never occurs as a subject
    CHECK_THROWS(make_base_dataset({Triple{ent(0), pred(0), uri("http://ex.org/alien")}}));
    BaseDataset ok = make_base_dataset({Triple{ent(0), pred(0), ent(0)},
                                        Triple{ent(0), pred(1), lit(1)}});
    CHECK(ok.entity_uris == std::set<Term>{ent(0)});
}

TEST_CASE("degenerate phi values pin the placement") {
    SplitMix64 rng(3);
    BaseDataset base = random_base(rng, 8, 3, 30);

    WebOfLinkedData both = generate_testweb(base, {1.0, 0.0, 7});
    WebOfLinkedData subj = generate_testweb(base, {0.0, 1.0, 7});
    WebOfLinkedData obj = generate_testweb(base, {0.0, 0.0, 7});

    for (const Triple& t : base.triples) {
        if (t.o.is_uri()) {
            const int expected_both = t.s == t.o ? 1 : 2;
            CHECK(docs_holding(both, t) == expected_both);
            CHECK(both.docs.at(t.s).triples.count(t) == 1);
            CHECK(both.docs.at(t.o).triples.count(t) == 1);
            CHECK(docs_holding(subj, t) == 1);
            CHECK(subj.docs.at(t.s).triples.count(t) == 1);
            CHECK(docs_holding(obj, t) == 1);
            CHECK(obj.docs.at(t.o).triples.count(t) == 1);
        } else {
            CHECK(docs_holding(both, t) == 1);
            CHECK(both.docs.at(t.s).triples.count(t) == 1);
        }
    }
}

TEST_CASE("generator invariants over random configurations") {
    SplitMix64 rng(17);
    for (int round = 0; round < 25; ++round) {
        BaseDataset base = random_base(rng, 10, 3, 40);
        TestWebConfig cfg{rng.next_unit(), rng.next_unit(), rng.next()};
        WebOfLinkedData web = generate_testweb(base, cfg);

        CHECK(web.docs.size() == base.entity_uris.size());

        // triple conservation: union of documents equals the base exactly
        std::set<Triple> in_union;
        for (const auto& [u, d] : web.docs) in_union.insert(d.triples.begin(), d.triples.end());
        CHECK(in_union == base.triples);

        for (const Triple& t : base.triples) {
            const int n = docs_holding(web, t);
            if (!t.o.is_uri()) {
                CHECK(n == 1);
                CHECK(web.docs.at(t.s).triples.count(t) == 1);
            } else {
                CHECK(n >= 1);
                CHECK(n <= 2);
            }
        }

        // determinism: same inputs, identical web
        WebOfLinkedData again = generate_testweb(base, cfg);
        CHECK(again.docs == web.docs);
    }
}

TEST_CASE("placement follows an independent replay of the seeded draw stream") {
    SplitMix64 rng(19);
    for (int round = 0; round < 10; ++round) {
        BaseDataset base = random_base(rng, 8, 3, 30);
        TestWebConfig cfg{0.4, 0.55, rng.next()};
        WebOfLinkedData web = generate_testweb(base, cfg);

        // replay: triples in lexicographic statement order, URI objects
        // consume one draw (both docs) or two (subject vs object)
        std::vector<std::pair<std::string, const Triple*>> ordered;
        for (const Triple& t : base.triples) ordered.emplace_back(triple_to_ntriples(t), &t);
        std::sort(ordered.begin(), ordered.end());
        SplitMix64 replay(cfg.seed);
        for (const auto& [line, tp] : ordered) {
            const Triple& t = *tp;
            if (!t.o.is_uri()) {
                CHECK(web.docs.at(t.s).triples.count(t) == 1);
                continue;
            }
            bool in_subject = web.docs.at(t.s).triples.count(t) == 1;
            bool in_object = web.docs.at(t.o).triples.count(t) == 1;
            if (replay.next_unit() < cfg.phi1) {
                CHECK(in_subject);
                CHECK(in_object);
            } else if (replay.next_unit() < cfg.phi2) {
                CHECK(in_subject);
                if (t.s != t.o) CHECK(!in_object);
            } else {
                CHECK(in_object);
                if (t.s != t.o) CHECK(!in_subject);
            }
        }
    }
}

TEST_CASE("regeneration writes byte-identical directories") {
    SplitMix64 rng(5);
    BaseDataset base = random_base(rng, 6, 2, 20);
    WebOfLinkedData web = generate_testweb(base, {0.62, 0.47, 11});

    namespace fs = std::filesystem;
    auto dir_a = fs::temp_directory_path() / "lt_gen_a";
    auto dir_b = fs::temp_directory_path() / "lt_gen_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    save_web(web, dir_a.string());
    save_web(generate_testweb(base, {0.62, 0.47, 11}), dir_b.string());

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    for (const auto& entry : fs::recursive_directory_iterator(dir_a)) {
        if (!entry.is_regular_file()) continue;
        auto rel = fs::relative(entry.path(), dir_a);
        CHECK(slurp(entry.path()) == slurp(dir_b / rel));
    }
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("standard configuration suite") {
    auto suite = standard_config_suite();
    REQUIRE(suite.size() == 14);
    CHECK(suite.back().phi1 == 0.62);
    CHECK(suite.back().phi2 == 0.47);
    CHECK(suite[12].phi1 == 1.0);
    CHECK(suite.front().phi1 == 0.0);
    CHECK(suite.front().phi2 == 0.0);
}

TEST_CASE("reachable subweb of a three-document chain") {
    // e0 -> e1 -> e2 linked by p0-triples, all matching (?x p0 ?y)
    WebOfLinkedData web;
    for (int i = 0; i < 3; ++i) {
        Document d;
        d.uri = ent(i);
        if (i < 2) d.triples.insert(Triple{ent(i), pred(0), ent(i + 1)});
        web.docs.emplace(d.uri, std::move(d));
    }
    BGPQuery q = make_query({TriplePattern{Variable{"x"}, pred(0), Variable{"y"}}});
    // no URI in the pattern: seed via an extra ground pattern would change the
    // query; instead check with seeds from a pattern anchored at e0
    BGPQuery anchored = make_query({TriplePattern{ent(0), pred(0), Variable{"y"}},
                                    TriplePattern{Variable{"y"}, pred(0), Variable{"z"}}});
    (void)q;

    ReachableSubweb subweb = compute_reachable_subweb(web, anchored);
    CHECK(subweb.documents == std::set<Term>{ent(0), ent(1), ent(2)});
    CHECK(subweb.seed_documents == std::set<Term>{ent(0)});
    // e0 mentions e0 (subject) and e1; e1 mentions e1 and e2; e2 holds nothing
    CHECK(subweb.edges.count({ent(0), ent(1)}) == 1);
    CHECK(subweb.edges.count({ent(1), ent(2)}) == 1);
}

TEST_CASE("subweb of a query matching nothing is the seed documents") {
    WebOfLinkedData web;
    Document d;
    d.uri = ent(0);
    d.triples.insert(Triple{ent(0), pred(1), lit(0)});
    web.docs.emplace(d.uri, std::move(d));

    BGPQuery q = make_query({TriplePattern{ent(0), pred(0), Variable{"x"}}});
    ReachableSubweb subweb = compute_reachable_subweb(web, q);
    CHECK(subweb.documents == std::set<Term>{ent(0)});
    CHECK(subweb.edges.empty());

    BGPQuery ground = make_query({TriplePattern{ent(0), pred(0), ent(1)}});
    ReachableSubweb sub2 = compute_reachable_subweb(web, ground);
    CHECK(sub2.documents.size() == 1);
    CHECK(sub2.edges.empty());
}

TEST_CASE("rcc ground truth on a crafted three-document web") {
    // solution needs triples from docs A and B; C is reachable but irrelevant
    WebOfLinkedData web;
    Document a{ent(0), {Triple{ent(0), pred(0), ent(1)}}};
    Document b{ent(1), {Triple{ent(1), pred(1), ent(2)}}};
    Document c{ent(2), {Triple{ent(2), pred(2), lit(0)}}};
    web.docs = {{ent(0), a}, {ent(1), b}, {ent(2), c}};

    BGPQuery q = make_query({TriplePattern{ent(0), pred(0), Variable{"x"}},
                             TriplePattern{Variable{"x"}, pred(1), Variable{"y"}}});
    auto rcc = compute_rcc(web, q);
    CHECK(rcc.at(ent(0).lexical) == 1);
    CHECK(rcc.at(ent(1).lexical) == 1);
    CHECK(rcc.at(ent(2).lexical) == 0);
    CHECK(rcc.count("http://ex.org/p0") == 0);  // not a document

    // sum of rcc equals summed provenance sizes
    auto sols = reachable_solutions(web, q);
    std::size_t prov_total = 0;
    for (const auto& s : sols) prov_total += s.provenance.size();
    std::int64_t rcc_total = 0;
    for (const auto& [u, n] : rcc) rcc_total += n;
    CHECK(static_cast<std::size_t>(rcc_total) == prov_total);
}

TEST_CASE("rcc sum equals provenance sum on random instances") {
    SplitMix64 rng(29);
    for (int round = 0; round < 20; ++round) {
        Instance inst = random_instance(rng, round);
        auto rcc = compute_rcc(inst.web, inst.query);
        auto sols = reachable_solutions(inst.web, inst.query);
        std::size_t prov_total = 0;
        for (const auto& s : sols) prov_total += s.provenance.size();
        std::int64_t rcc_total = 0;
        for (const auto& [u, n] : rcc) rcc_total += n;
        CHECK(static_cast<std::size_t>(rcc_total) == prov_total);
    }
}

TEST_CASE("subweb statistics basics") {
    ReachableSubweb single;
    single.documents = {ent(0)};
    single.seed_documents = {ent(0)};
    SubwebStats s = subweb_statistics(single, {{ent(0).lexical, 0}}, 0);
    CHECK(s.n_scc == 1);
    CHECK(s.diameter == 0);
    CHECK(s.n_docs == 1);

    ReachableSubweb cycle;
    cycle.documents = {ent(0), ent(1), ent(2)};
    cycle.seed_documents = {ent(0)};
    cycle.edges = {{ent(0), ent(1)}, {ent(1), ent(2)}, {ent(2), ent(0)}};
    SubwebStats c = subweb_statistics(cycle, {}, 0);
    CHECK(c.n_scc == 1);
    CHECK(c.diameter == 2);
}

TEST_CASE("scc and diameter match naive oracles on random graphs") {
    SplitMix64 rng(31);
    for (int round = 0; round < 30; ++round) {
        const int n = 2 + static_cast<int>(rng.next() % 24);
        ReachableSubweb g;
        for (int i = 0; i < n; ++i) g.documents.insert(ent(i));
        g.seed_documents = {ent(0)};
        const int m = static_cast<int>(rng.next() % static_cast<std::uint64_t>(3 * n));
        for (int e = 0; e < m; ++e) {
            g.edges.insert({ent(static_cast<int>(rng.next() % n)), ent(static_cast<int>(rng.next() % n))});
        }
        SubwebStats s = subweb_statistics(g, {}, 0);
        CHECK(s.n_scc == naive_scc_count(g.documents, g.edges));
        CHECK(s.diameter == naive_diameter(g.documents, g.edges));
    }
}

TEST_CASE("stats csv row shape") {
    ReachableSubweb single;
    single.documents = {ent(0)};
    single.seed_documents = {ent(0)};
    SubwebStats s = subweb_statistics(single, {{ent(0).lexical, 2}}, 2);
    std::string row = subweb_stats_csv_row("q1", s);
    CHECK(row.substr(0, 3) == "q1,");
    std::size_t commas = 0;
    for (char ch : row) commas += ch == ',' ? 1 : 0;
    std::size_t header_commas = 0;
    for (char ch : subweb_stats_csv_header()) header_commas += ch == ',' ? 1 : 0;
    CHECK(commas == header_commas);
}
