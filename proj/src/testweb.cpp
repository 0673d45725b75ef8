#include "linktrail/testweb.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "linktrail/ntriples.hpp"
#include "linktrail/rng.hpp"

namespace linktrail {

BaseDataset make_base_dataset(std::set<Triple> triples) {
    BaseDataset base;
    for (const Triple& t : triples) {
        if (!t.s.is_uri()) throw std::runtime_error("base dataset subject is not a URI: " + term_to_ntriples(t.s));
        base.entity_uris.insert(t.s);
    }
    for (const Triple& t : triples) {
        if (t.o.is_uri() && base.entity_uris.count(t.o) == 0) {
            throw std::runtime_error("base dataset URI object is not an entity: " + t.o.lexical);
        }
        if (t.o.is_blank()) throw std::runtime_error("base dataset contains a blank node object");
    }
    base.triples = std::move(triples);
    return base;
}

WebOfLinkedData generate_testweb(const BaseDataset& base, const TestWebConfig& cfg) {
    if (cfg.phi1 < 0 || cfg.phi1 > 1 || cfg.phi2 < 0 || cfg.phi2 > 1) {
        throw std::runtime_error("phi probabilities must lie in [0,1]");
    }

    WebOfLinkedData web;
    for (const Term& u : base.entity_uris) web.docs.emplace(u, Document{u, {}});

    // canonical order: lexicographic on the serialized statement
    std::vector<std::pair<std::string, const Triple*>> ordered;
    ordered.reserve(base.triples.size());
    for (const Triple& t : base.triples) ordered.emplace_back(triple_to_ntriples(t), &t);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    SplitMix64 rng(cfg.seed);
    for (const auto& [line, tp] : ordered) {
        const Triple& t = *tp;
        if (!t.o.is_uri()) {
            web.docs.at(t.s).triples.insert(t);
            continue;
        }
        const double u1 = rng.next_unit();
        if (u1 < cfg.phi1) {
            web.docs.at(t.s).triples.insert(t);
            web.docs.at(t.o).triples.insert(t);
        } else if (rng.next_unit() < cfg.phi2) {
            web.docs.at(t.s).triples.insert(t);
        } else {
            web.docs.at(t.o).triples.insert(t);
        }
    }
    return web;
}

std::vector<TestWebConfig> standard_config_suite() {
    std::vector<TestWebConfig> suite;
    for (double phi1 : {0.0, 0.33, 0.66}) {
        for (double phi2 : {0.0, 0.33, 0.66, 1.0}) {
            suite.push_back(TestWebConfig{phi1, phi2, 0});
        }
    }
    suite.push_back(TestWebConfig{1.0, 0.0, 0});  // phi2 irrelevant when phi1 = 1
    suite.push_back(TestWebConfig{0.62, 0.47, 0});
    return suite;
}

ReachableSubweb compute_reachable_subweb(const WebOfLinkedData& web, const BGPQuery& query) {
    ReachableSubweb out;

    std::deque<Term> frontier;
    auto schedule = [&](const Term& u) {
        if (out.attempted_lookups.insert(u).second) frontier.push_back(u);
    };
    for (const Term& seed : query.seeds) schedule(seed);

    while (!frontier.empty()) {
        Term u = frontier.front();
        frontier.pop_front();
        const Document* d = web.find(u);
        if (d == nullptr) continue;
        out.documents.insert(u);
        if (query.seeds.count(u) > 0) out.seed_documents.insert(u);

        for (const Triple& t : d->triples) {
            bool matches = false;
            for (const TriplePattern& tp : query.patterns) {
                if (match_triple(tp, t)) {
                    matches = true;
                    break;
                }
            }
            if (!matches) continue;
            for (const Term* pos : {&t.s, &t.p, &t.o}) {
                if (!pos->is_uri()) continue;
                schedule(*pos);
                if (web.find(*pos) != nullptr) out.edges.insert({u, *pos});
            }
        }
    }
    return out;
}

std::vector<EvaluatedSolution> reachable_solutions(const WebOfLinkedData& web, const BGPQuery& query,
                                                   bool set_semantics) {
    ReachableSubweb subweb = compute_reachable_subweb(web, query);
    std::vector<TripleOccurrence> data;
    for (const Term& u : subweb.documents) {
        const Document* d = web.find(u);
        for (const Triple& t : d->triples) data.push_back(TripleOccurrence{t, u.lexical});
    }
    return evaluate_bgp(query, data, set_semantics);
}

std::map<std::string, std::int64_t> compute_rcc(const WebOfLinkedData& web, const BGPQuery& query) {
    ReachableSubweb subweb = compute_reachable_subweb(web, query);
    std::map<std::string, std::int64_t> rcc;
    for (const Term& u : subweb.documents) rcc[u.lexical] = 0;
    for (const EvaluatedSolution& sol : reachable_solutions(web, query)) {
        for (const std::string& doc : sol.provenance) rcc[doc] += 1;
    }
    return rcc;
}

namespace {

PathStats summarize(const std::vector<std::int64_t>& values) {
    PathStats s;
    s.count = values.size();
    if (values.empty()) return s;
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    double sum = 0;
    for (auto v : values) sum += static_cast<double>(v);
    s.mean = sum / static_cast<double>(values.size());
    double sq = 0;
    for (auto v : values) sq += (static_cast<double>(v) - s.mean) * (static_cast<double>(v) - s.mean);
    s.stdev = values.size() > 1 ? std::sqrt(sq / static_cast<double>(values.size() - 1)) : 0.0;
    return s;
}

}  // namespace

SubwebStats subweb_statistics(const ReachableSubweb& subweb,
                              const std::map<std::string, std::int64_t>& rcc_map,
                              std::size_t result_cardinality) {
    SubwebStats stats;
    stats.n_docs = subweb.documents.size();
    stats.n_edges = subweb.edges.size();
    stats.result_cardinality = result_cardinality;

    std::vector<Term> verts(subweb.documents.begin(), subweb.documents.end());
    std::map<Term, std::size_t> index;
    for (std::size_t i = 0; i < verts.size(); ++i) index[verts[i]] = i;

    std::vector<std::vector<std::size_t>> adj(verts.size());
    for (const auto& [from, to] : subweb.edges) adj[index.at(from)].push_back(index.at(to));

    // Tarjan SCC, iterative
    {
        const std::size_t n = verts.size();
        std::vector<std::int64_t> disc(n, -1), low(n, 0);
        std::vector<bool> on_stack(n, false);
        std::vector<std::size_t> stack;
        std::int64_t timer = 0;
        std::size_t scc_count = 0;

        struct Frame {
            std::size_t v;
            std::size_t edge = 0;
        };
        for (std::size_t root = 0; root < n; ++root) {
            if (disc[root] != -1) continue;
            std::vector<Frame> call{{root, 0}};
            disc[root] = low[root] = timer++;
            stack.push_back(root);
            on_stack[root] = true;
            while (!call.empty()) {
                Frame& f = call.back();
                if (f.edge < adj[f.v].size()) {
                    std::size_t w = adj[f.v][f.edge++];
                    if (disc[w] == -1) {
                        disc[w] = low[w] = timer++;
                        stack.push_back(w);
                        on_stack[w] = true;
                        call.push_back({w, 0});
                    } else if (on_stack[w]) {
                        low[f.v] = std::min(low[f.v], disc[w]);
                    }
                } else {
                    if (low[f.v] == disc[f.v]) {
                        ++scc_count;
                        while (true) {
                            std::size_t w = stack.back();
                            stack.pop_back();
                            on_stack[w] = false;
                            if (w == f.v) break;
                        }
                    }
                    std::size_t v = f.v;
                    call.pop_back();
                    if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
                }
            }
        }
        stats.n_scc = scc_count;
    }

    // diameter = max finite eccentricity (BFS from every vertex)
    std::int64_t diameter = 0;
    for (std::size_t s = 0; s < verts.size(); ++s) {
        std::vector<std::int64_t> dist(verts.size(), -1);
        std::deque<std::size_t> queue{s};
        dist[s] = 0;
        while (!queue.empty()) {
            std::size_t v = queue.front();
            queue.pop_front();
            for (std::size_t w : adj[v]) {
                if (dist[w] == -1) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        for (auto d : dist) diameter = std::max(diameter, d);
    }
    stats.diameter = diameter;

    // multi-source BFS from the seed documents
    std::vector<std::int64_t> seed_dist(verts.size(), -1);
    {
        std::deque<std::size_t> queue;
        for (const Term& seed : subweb.seed_documents) {
            std::size_t i = index.at(seed);
            seed_dist[i] = 0;
            queue.push_back(i);
        }
        while (!queue.empty()) {
            std::size_t v = queue.front();
            queue.pop_front();
            for (std::size_t w : adj[v]) {
                if (seed_dist[w] == -1) {
                    seed_dist[w] = seed_dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }

    std::vector<std::int64_t> relevant, irrelevant;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        if (seed_dist[i] < 0) continue;  // not reachable in the pure link graph, not a seed
        auto it = rcc_map.find(verts[i].lexical);
        bool is_relevant = it != rcc_map.end() && it->second > 0;
        (is_relevant ? relevant : irrelevant).push_back(seed_dist[i]);
        if (is_relevant) ++stats.n_relevant;
    }
    stats.relevant_paths = summarize(relevant);
    stats.irrelevant_paths = summarize(irrelevant);
    stats.pct_relevant =
        stats.n_docs == 0 ? 0.0
                          : 100.0 * static_cast<double>(stats.n_relevant) / static_cast<double>(stats.n_docs);
    return stats;
}

std::string subweb_stats_csv_header() {
    return "query,n_docs,n_edges,n_scc,diameter,n_relevant,pct_relevant,"
           "rel_path_mean,rel_path_stdev,rel_path_min,rel_path_max,"
           "irrel_path_mean,irrel_path_stdev,irrel_path_min,irrel_path_max,result_cardinality";
}

std::string subweb_stats_csv_row(const std::string& query_name, const SubwebStats& s) {
    std::ostringstream out;
    out << query_name << ',' << s.n_docs << ',' << s.n_edges << ',' << s.n_scc << ',' << s.diameter << ','
        << s.n_relevant << ',' << s.pct_relevant << ',' << s.relevant_paths.mean << ','
        << s.relevant_paths.stdev << ',' << s.relevant_paths.min << ',' << s.relevant_paths.max << ','
        << s.irrelevant_paths.mean << ',' << s.irrelevant_paths.stdev << ',' << s.irrelevant_paths.min << ','
        << s.irrelevant_paths.max << ',' << s.result_cardinality;
    return out.str();
}

void save_genconfig(const std::string& dir, const TestWebConfig& cfg) {
    nlohmann::json j{{"phi1", cfg.phi1}, {"phi2", cfg.phi2}, {"seed", cfg.seed}};
    std::ofstream out(std::filesystem::path(dir) / "genconfig.json", std::ios::trunc);
    out << j.dump(2) << "\n";
}

std::optional<TestWebConfig> load_genconfig(const std::string& dir) {
    std::ifstream in(std::filesystem::path(dir) / "genconfig.json");
    if (!in) return std::nullopt;
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    TestWebConfig cfg;
    cfg.phi1 = j.value("phi1", 0.0);
    cfg.phi2 = j.value("phi2", 0.0);
    cfg.seed = j.value("seed", std::uint64_t{0});
    return cfg;
}

}  // namespace linktrail
