#include <csignal>
#include <filesystem>
#include <set>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "linktrail/engine.hpp"
#include "linktrail/harness.hpp"
#include "linktrail/http_web.hpp"
#include "linktrail/ntriples.hpp"
#include "linktrail/query_parse.hpp"
#include "linktrail/testweb.hpp"
#include "linktrail/webmodel.hpp"

namespace {

using namespace linktrail;
namespace fs = std::filesystem;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_input_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

WebOfLinkedData cli_load_web(const std::string& dir) {
    if (!fs::exists(fs::path(dir) / "manifest.json")) {
        throw InputError("no web manifest under " + dir);
    }
    try {
        return load_web(dir);
    } catch (const std::exception& e) {
        throw InputError(std::string("cannot load web: ") + e.what());
    }
}

BGPQuery cli_load_query(const std::string& path) { return parse_query(read_input_file(path)); }

std::string solution_json(const SolutionMapping& mu) {
    nlohmann::ordered_json j;
    for (const auto& [var, term] : mu.bindings) j[var] = term_to_ntriples(term);
    return j.dump();
}

void write_output_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path);
    out << content;
}

volatile std::sig_atomic_t g_stop_requested = 0;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"linktrail - traversal-based query execution over Webs of Linked Data"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    bool verbose = false;
    std::string format = "csv";
    app.add_option("--seed", seed, "Seed for all randomized behavior")->capture_default_str();
    app.add_flag("--verbose", verbose, "Chatty progress output on stderr");
    app.add_option("--format", format, "Output format for tabular results")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    // --- gen ---------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "Generate a test Web from a base dataset");
    std::string gen_base, gen_out;
    double gen_phi1 = 0, gen_phi2 = 0;
    std::uint64_t gen_base_ms = 50, gen_jitter_ms = 0;
    gen->add_option("--base", gen_base, "Base dataset (N-Triples)")->required();
    gen->add_option("--phi1", gen_phi1, "Probability of placing a URI-object triple in both documents")
        ->required();
    gen->add_option("--phi2", gen_phi2, "Conditional probability of subject-only placement")->required();
    gen->add_option("--out", gen_out, "Output web directory")->required();
    gen->add_option("--base-ms", gen_base_ms, "Lookup latency base (ms)")->capture_default_str();
    gen->add_option("--jitter-ms", gen_jitter_ms, "Lookup latency jitter span (ms)")->capture_default_str();

    // --- serve -------------------------------------------------------------
    auto* serve = app.add_subcommand("serve", "Serve a web directory over HTTP");
    std::string serve_web;
    int serve_port = 8080;
    bool serve_no_latency = false;
    serve->add_option("--web", serve_web, "Web directory")->required();
    serve->add_option("--port", serve_port, "Port to bind")->capture_default_str();
    serve->add_flag("--no-latency", serve_no_latency, "Skip the simulated per-lookup delay");

    // --- run ---------------------------------------------------------------
    auto* run = app.add_subcommand("run", "Execute a query; solutions stream to stdout as JSON lines");
    std::string run_web, run_query, run_strategy = "baseline", run_policy = "lr-mi";
    std::string run_trace, run_rcc, run_dot;
    int run_threads = 1;
    bool run_set_semantics = false, run_deterministic = false;
    run->add_option("--web", run_web, "Web directory or http:// endpoint")->required();
    run->add_option("--query", run_query, "Query file")->required();
    run->add_option("--strategy", run_strategy, "URI prioritization strategy")->capture_default_str();
    run->add_option("--policy", run_policy, "Dispatcher routing policy")->capture_default_str();
    run->add_option("--threads", run_threads, "Lookup threads")->capture_default_str();
    run->add_flag("--set-semantics", run_set_semantics, "Collapse duplicate matching triples per operator");
    run->add_flag("--deterministic", run_deterministic, "Single-threaded reproducible schedule");
    run->add_option("--trace", run_trace, "Write the execution trace (JSON lines)");
    run->add_option("--rcc", run_rcc, "Precomputed RCC map (required by --strategy oracle)");
    run->add_option("--dump-linkgraph", run_dot, "Write the final link graph (DOT)");

    // --- experiment ----------------------------------------------------------
    auto* experiment = app.add_subcommand("experiment", "Run an experiment sweep or a dominance experiment");
    std::string exp_spec, exp_compare_out, exp_web, exp_query;
    std::vector<int> exp_threads_list;
    bool exp_dominance = false;
    experiment->add_option("--spec", exp_spec, "Experiment spec (.json or .yaml)");
    experiment->add_option("--compare", exp_compare_out, "Also write a baseline comparison table (CSV)");
    experiment->add_flag("--dominance", exp_dominance, "Cache-warm vs cold retrieval comparison");
    experiment->add_option("--web", exp_web, "Web directory (dominance mode)");
    experiment->add_option("--query", exp_query, "Query file (dominance mode)");
    experiment->add_option("--threads-list", exp_threads_list, "Thread counts (dominance mode)");

    // --- stats ---------------------------------------------------------------
    auto* stats = app.add_subcommand("stats", "Reachable-subweb statistics for a query");
    std::string stats_web, stats_query;
    stats->add_option("--web", stats_web, "Web directory")->required();
    stats->add_option("--query", stats_query, "Query file")->required();

    // --- rcc-dry-run -----------------------------------------------------------
    auto* dry = app.add_subcommand("rcc-dry-run", "Baseline dry run collecting per-document RCCs");
    std::string dry_web, dry_query, dry_out;
    dry->add_option("--web", dry_web, "Web directory")->required();
    dry->add_option("--query", dry_query, "Query file")->required();
    dry->add_option("--out", dry_out, "Output JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*gen) {
            std::cerr << "config: gen base=" << gen_base << " phi1=" << gen_phi1 << " phi2=" << gen_phi2
                      << " seed=" << seed << " base_ms=" << gen_base_ms << " jitter_ms=" << gen_jitter_ms
                      << " out=" << gen_out << "\n";
            BaseDataset base;
            try {
                base = make_base_dataset(parse_ntriples(read_input_file(gen_base)));
            } catch (const ParseError&) {
                throw;
            } catch (const InputError&) {
                throw;
            } catch (const std::exception& e) {
                throw InputError(e.what());
            }
            TestWebConfig cfg{gen_phi1, gen_phi2, seed};
            WebOfLinkedData web = generate_testweb(base, cfg);
            web.latency = LatencyModel{gen_base_ms, gen_jitter_ms, seed};
            save_web(web, gen_out);
            save_genconfig(gen_out, cfg);
            std::cerr << "wrote " << web.docs.size() << " documents to " << gen_out << "\n";
        } else if (*serve) {
            std::cerr << "config: serve web=" << serve_web << " port=" << serve_port
                      << " latency=" << (serve_no_latency ? "off" : "on") << "\n";
            WebOfLinkedData web = cli_load_web(serve_web);
            HttpWebServer server(web, serve_port, !serve_no_latency);
            std::cerr << "listening on " << server.base_url() << "/lookup?uri=...  (Ctrl-C to stop)\n";
            std::signal(SIGINT, [](int) { g_stop_requested = 1; });
            std::signal(SIGTERM, [](int) { g_stop_requested = 1; });
            while (!g_stop_requested) std::this_thread::sleep_for(std::chrono::milliseconds(100));
            server.stop();
        } else if (*run) {
            auto strategy = strategy_from_name(run_strategy);
            if (!strategy) {
                std::cerr << "unknown strategy: " << run_strategy << "\n";
                return 1;
            }
            if (*strategy == StrategyKind::Oracle && run_rcc.empty()) {
                std::cerr << "--strategy oracle requires --rcc <file.json>\n";
                return 1;
            }
            BGPQuery query = cli_load_query(run_query);
            auto policy = routing_policy_from_name(run_policy, query.patterns.size());
            if (!policy) {
                std::cerr << "unknown policy: " << run_policy << "\n";
                return 1;
            }

            EngineConfig cfg;
            cfg.strategy = *strategy;
            cfg.routing = *policy;
            cfg.lookup_threads = run_threads;
            cfg.set_semantics = run_set_semantics;
            cfg.deterministic = run_deterministic;
            cfg.seed = seed;
            if (!run_rcc.empty()) cfg.oracle_rcc = load_rcc_map(run_rcc);
            cfg.on_solution = [](const SolutionMapping& mu, std::uint64_t) {
                std::cout << solution_json(mu) << "\n" << std::flush;
            };
            if (verbose) {
                cfg.on_lookup = [](const Term& u, bool ok) {
                    std::cerr << "lookup " << u.lexical << (ok ? "" : " (failed)") << "\n";
                };
            }
            std::cerr << "config: run web=" << run_web << " query=" << run_query
                      << " strategy=" << run_strategy << " policy=" << routing_policy_name(*policy)
                      << " threads=" << (cfg.deterministic ? 1 : cfg.lookup_threads)
                      << " deterministic=" << (cfg.deterministic ? "yes" : "no")
                      << " semantics=" << (run_set_semantics ? "set" : "bag") << " seed=" << seed << "\n";

            ExecutionResult result;
            const bool over_http = run_web.rfind("http://", 0) == 0 || run_web.rfind("https://", 0) == 0;
            if (over_http) {
                HttpAccess access(run_web);
                result = execute(query, access, cfg);
            } else {
                WebOfLinkedData web = cli_load_web(run_web);
                VirtualClock clock;
                InProcessAccess access(web, clock);
                result = execute(query, access, cfg);
            }

            if (!run_trace.empty()) write_output_file(run_trace, trace_to_jsonl(result.trace));
            if (!run_dot.empty()) write_output_file(run_dot, result.linkgraph_dot);
            std::cerr << "solutions=" << result.solutions.size() << " lookups=" << result.lookup_order.size()
                      << " retrieved=" << result.retrieved.size()
                      << " duration_us=" << (result.trace.t_end() - result.trace.t_start()) << "\n";
        } else if (*experiment) {
            if (exp_dominance) {
                if (exp_web.empty() || exp_query.empty()) {
                    std::cerr << "--dominance requires --web and --query\n";
                    return 1;
                }
                if (exp_threads_list.empty()) exp_threads_list = {1, 2, 4};
                std::cerr << "config: experiment dominance web=" << exp_web << " query=" << exp_query
                          << " seed=" << seed << "\n";
                WebOfLinkedData web = cli_load_web(exp_web);
                BGPQuery query = cli_load_query(exp_query);
                auto rows = dominance_experiment(web, query, exp_threads_list, seed);
                if (format == "json") {
                    nlohmann::json arr = nlohmann::json::array();
                    for (const auto& r : rows) {
                        arr.push_back({{"mode", r.mode},
                                       {"threads", r.threads},
                                       {"virtual_us", r.virtual_us},
                                       {"wall_us", r.wall_us},
                                       {"total_ms", r.total_ms},
                                       {"lookups", r.lookups},
                                       {"ratio_vs_warm", r.ratio_vs_warm}});
                    }
                    std::cout << arr.dump(2) << "\n";
                } else {
                    std::cout << dominance_csv(rows);
                }
            } else {
                if (exp_spec.empty()) {
                    std::cerr << "experiment requires --spec (or --dominance)\n";
                    return 1;
                }
                std::cerr << "config: experiment spec=" << exp_spec << "\n";
                ExperimentSpec spec = load_experiment_spec(exp_spec);
                auto cells = run_experiment(spec, verbose ? &std::cerr : nullptr);
                if (format == "json") {
                    nlohmann::json arr = nlohmann::json::array();
                    for (const auto& c : cells) {
                        nlohmann::json j{{"web", c.web},       {"query", c.query},   {"strategy", c.strategy},
                                         {"policy", c.policy}, {"metric", c.metric}, {"n", c.n}};
                        if (c.gmean) j["gmean"] = *c.gmean;
                        if (c.stdev) j["stdev"] = *c.stdev;
                        if (!c.error.empty()) j["error"] = c.error;
                        arr.push_back(std::move(j));
                    }
                    std::cout << arr.dump(2) << "\n";
                } else {
                    std::cout << experiment_csv(cells);
                }
                std::size_t errored = 0;
                for (const auto& c : cells) errored += c.error.empty() ? 0 : 1;
                if (errored > 0) {
                    std::cerr << errored << " of " << cells.size() << " cells errored; first errors:\n";
                    std::set<std::string> seen;
                    for (const auto& c : cells) {
                        if (c.error.empty() || !seen.insert(c.error).second) continue;
                        std::cerr << "  " << c.web << "/" << c.query << "/" << c.strategy << ": " << c.error
                                  << "\n";
                        if (seen.size() >= 5) break;
                    }
                }
                if (!exp_compare_out.empty()) {
                    std::map<std::string, double> phi1;
                    for (const auto& w : spec.webs) {
                        if (w.phi1) phi1[w.name] = *w.phi1;
                    }
                    write_output_file(exp_compare_out, comparison_csv(comparison_report(cells, phi1)));
                    std::cerr << "wrote comparison table to " << exp_compare_out << "\n";
                }
            }
        } else if (*stats) {
            std::cerr << "config: stats web=" << stats_web << " query=" << stats_query << "\n";
            WebOfLinkedData web = cli_load_web(stats_web);
            BGPQuery query = cli_load_query(stats_query);
            ReachableSubweb subweb = compute_reachable_subweb(web, query);
            auto rcc = compute_rcc(web, query);
            std::size_t cardinality = reachable_solutions(web, query).size();
            SubwebStats s = subweb_statistics(subweb, rcc, cardinality);
            std::string name = fs::path(stats_query).stem().string();
            if (format == "json") {
                nlohmann::json j{{"query", name},
                                 {"n_docs", s.n_docs},
                                 {"n_edges", s.n_edges},
                                 {"n_scc", s.n_scc},
                                 {"diameter", s.diameter},
                                 {"n_relevant", s.n_relevant},
                                 {"pct_relevant", s.pct_relevant},
                                 {"result_cardinality", s.result_cardinality}};
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << subweb_stats_csv_header() << "\n" << subweb_stats_csv_row(name, s) << "\n";
            }
        } else if (*dry) {
            std::cerr << "config: rcc-dry-run web=" << dry_web << " query=" << dry_query
                      << " out=" << dry_out << " seed=" << seed << "\n";
            WebOfLinkedData web = cli_load_web(dry_web);
            BGPQuery query = cli_load_query(dry_query);
            auto rcc = rcc_dry_run(web, query, seed);
            save_rcc_map(dry_out, rcc);
            std::cerr << "wrote RCCs for " << rcc.size() << " documents to " << dry_out << "\n";
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
