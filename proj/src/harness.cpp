#include "linktrail/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "linktrail/query_parse.hpp"

namespace linktrail {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string basename_of(const std::string& path) {
    std::string stem = fs::path(path).stem().string();
    if (!stem.empty()) return stem;
    return fs::path(path).filename().string().empty() ? path
                                                      : fs::path(path).filename().string();
}

std::string web_name_of(const std::string& path) {
    fs::path p(path);
    std::string name = p.filename().string();
    if (name.empty()) name = p.parent_path().filename().string();
    return name.empty() ? path : name;
}

ExperimentSpec spec_from_json(const json& j) {
    ExperimentSpec spec;
    for (const auto& w : j.at("webs")) {
        ExperimentSpec::WebRef ref;
        ref.path = w.get<std::string>();
        ref.name = web_name_of(ref.path);
        if (auto cfg = load_genconfig(ref.path)) ref.phi1 = cfg->phi1;
        spec.webs.push_back(std::move(ref));
    }
    for (const auto& q : j.at("queries")) {
        std::string path = q.get<std::string>();
        spec.queries.push_back({basename_of(path), path});
    }
    for (const auto& s : j.at("strategies")) {
        auto kind = strategy_from_name(s.get<std::string>());
        if (!kind) throw std::runtime_error("unknown strategy: " + s.get<std::string>());
        spec.strategies.push_back(*kind);
    }
    for (const auto& p : j.at("policies")) spec.policies.push_back(p.get<std::string>());
    spec.repetitions = j.value("repetitions", 5);
    spec.seed_base = j.value("seed_base", std::uint64_t{1});
    std::string rule = j.value("seed_rule", std::string("increment"));
    if (rule == "fixed") spec.seed_rule = ExperimentSpec::SeedRule::Fixed;
    else if (rule == "increment") spec.seed_rule = ExperimentSpec::SeedRule::Increment;
    else throw std::runtime_error("unknown seed_rule: " + rule);
    spec.deterministic = j.value("deterministic", true);
    spec.lookup_threads = j.value("lookup_threads", 1);
    return spec;
}

json yaml_to_json(const YAML::Node& node) {
    switch (node.Type()) {
        case YAML::NodeType::Scalar: {
            const std::string& s = node.Scalar();
            try {
                std::size_t used = 0;
                long long v = std::stoll(s, &used);
                if (used == s.size()) return json(v);
            } catch (...) {
            }
            try {
                std::size_t used = 0;
                double v = std::stod(s, &used);
                if (used == s.size()) return json(v);
            } catch (...) {
            }
            if (s == "true") return json(true);
            if (s == "false") return json(false);
            return json(s);
        }
        case YAML::NodeType::Sequence: {
            json arr = json::array();
            for (const auto& item : node) arr.push_back(yaml_to_json(item));
            return arr;
        }
        case YAML::NodeType::Map: {
            json obj = json::object();
            for (const auto& kv : node) obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
            return obj;
        }
        default: return json();
    }
}

}  // namespace

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open experiment spec: " + path);
    if (fs::path(path).extension() == ".json") {
        return spec_from_json(json::parse(in));
    }
    YAML::Node root = YAML::Load(in);
    return spec_from_json(yaml_to_json(root));
}

std::vector<ExperimentCell> run_experiment(const ExperimentSpec& spec, std::ostream* progress) {
    std::vector<ExperimentCell> cells;

    for (const auto& web_ref : spec.webs) {
        WebOfLinkedData web = load_web(web_ref.path);
        for (const auto& query_ref : spec.queries) {
            std::ifstream qin(query_ref.path);
            if (!qin) throw std::runtime_error("cannot open query: " + query_ref.path);
            std::stringstream qss;
            qss << qin.rdbuf();
            BGPQuery query = parse_query(qss.str());

            // the oracle strategy's input, shared across its repetitions
            std::map<std::string, std::int64_t> oracle_rcc;
            bool oracle_needed = false;
            for (StrategyKind s : spec.strategies) oracle_needed |= s == StrategyKind::Oracle;
            if (oracle_needed) oracle_rcc = compute_rcc(web, query);

            for (StrategyKind strategy : spec.strategies) {
                for (const std::string& policy_name : spec.policies) {
                    auto policy = routing_policy_from_name(policy_name, query.patterns.size());
                    ExperimentCell base;
                    base.web = web_ref.name;
                    base.query = query_ref.name;
                    base.strategy = strategy_name(strategy);
                    base.policy = policy_name;
                    base.n = spec.repetitions;

                    auto push_metric_rows = [&](const std::map<std::string, std::vector<double>>& samples,
                                                const std::string& error) {
                        for (const char* metric : {"relRT1st", "relRT50", "relRTCmpl"}) {
                            ExperimentCell cell = base;
                            cell.metric = metric;
                            cell.error = error;
                            auto it = samples.find(metric);
                            if (error.empty() && it != samples.end() && !it->second.empty()) {
                                cell.gmean = geometric_mean(it->second);
                                cell.stdev = sample_stdev(it->second);
                            }
                            cells.push_back(std::move(cell));
                        }
                    };

                    if (!policy) {
                        push_metric_rows({}, "unknown policy");
                        continue;
                    }

                    std::map<std::string, std::vector<double>> samples;
                    std::string error;
                    try {
                        for (int rep = 0; rep < spec.repetitions; ++rep) {
                            EngineConfig cfg;
                            cfg.strategy = strategy;
                            cfg.oracle_rcc = oracle_rcc;
                            cfg.routing = *policy;
                            cfg.deterministic = spec.deterministic;
                            cfg.lookup_threads = spec.lookup_threads;
                            cfg.seed = spec.seed_rule == ExperimentSpec::SeedRule::Fixed
                                           ? spec.seed_base
                                           : spec.seed_base + static_cast<std::uint64_t>(rep);

                            VirtualClock clock;
                            InProcessAccess access(web, clock);
                            ExecutionResult result = execute(query, access, cfg);
                            ResponseTimes rt = response_times(result.trace, result.solutions.size());
                            if (!rt.rel_rt_1st) {
                                error = "empty result";
                                break;
                            }
                            samples["relRT1st"].push_back(*rt.rel_rt_1st);
                            samples["relRT50"].push_back(*rt.rel_rt_50);
                            samples["relRTCmpl"].push_back(*rt.rel_rt_cmpl);
                        }
                    } catch (const std::exception& e) {
                        error = e.what();
                    }
                    push_metric_rows(samples, error);
                    if (progress) {
                        (*progress) << "cell web=" << base.web << " query=" << base.query
                                    << " strategy=" << base.strategy << " policy=" << base.policy
                                    << (error.empty() ? "" : " error=" + error) << "\n";
                    }
                }
            }
        }
    }
    return cells;
}

std::string experiment_csv(const std::vector<ExperimentCell>& cells) {
    std::ostringstream out;
    out << "web,query,strategy,policy,metric,gmean,stdev,n\n";
    out.precision(12);
    for (const auto& c : cells) {
        out << c.web << ',' << c.query << ',' << c.strategy << ',' << c.policy << ',' << c.metric << ',';
        if (c.gmean) out << *c.gmean;
        out << ',';
        if (c.stdev) out << *c.stdev;
        out << ',' << c.n << '\n';
    }
    return out.str();
}

std::vector<ExperimentCell> parse_experiment_csv(const std::string& csv) {
    std::vector<ExperimentCell> cells;
    std::istringstream in(csv);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        while (fields.size() < 8) fields.push_back("");
        ExperimentCell c;
        c.web = fields[0];
        c.query = fields[1];
        c.strategy = fields[2];
        c.policy = fields[3];
        c.metric = fields[4];
        if (!fields[5].empty()) c.gmean = std::stod(fields[5]);
        if (!fields[6].empty()) c.stdev = std::stod(fields[6]);
        if (!fields[7].empty()) c.n = std::stoi(fields[7]);
        cells.push_back(std::move(c));
    }
    return cells;
}

std::vector<DominanceRow> dominance_experiment(const WebOfLinkedData& web, const BGPQuery& query,
                                               const std::vector<int>& threads_list,
                                               std::uint64_t seed) {
    std::vector<DominanceRow> rows;

    auto run = [&](WebAccess& access, bool deterministic, int threads) {
        EngineConfig cfg;
        cfg.strategy = StrategyKind::Baseline;
        cfg.routing.kind = RoutingPolicyKind::Lr;
        cfg.deterministic = deterministic;
        cfg.lookup_threads = threads;
        cfg.seed = seed;
        auto wall_start = std::chrono::steady_clock::now();
        ExecutionResult result = execute(query, access, cfg);
        auto wall_end = std::chrono::steady_clock::now();
        DominanceRow row;
        row.virtual_us = result.trace.t_end() - result.trace.t_start();
        row.wall_us = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::microseconds>(wall_end - wall_start).count());
        row.total_ms = static_cast<double>(row.virtual_us + row.wall_us) / 1000.0;
        return row;
    };

    // cache-warm execution: everything prefetched, zero lookups during the run
    {
        VirtualClock clock;
        InProcessAccess inner(web, clock);
        CachingAccess cache(inner);
        ReachableSubweb subweb = compute_reachable_subweb(web, query);
        for (const Term& u : subweb.attempted_lookups) cache.prefetch(u);
        const std::uint64_t lookups_before = inner.lookups_performed();
        DominanceRow row = run(cache, true, 1);
        row.mode = "warm";
        row.threads = 1;
        row.lookups = inner.lookups_performed() - lookups_before;
        row.ratio_vs_warm = 1.0;
        rows.push_back(row);
    }
    const double warm_total = rows.front().total_ms;

    for (int threads : threads_list) {
        VirtualClock clock;
        InProcessAccess access(web, clock, threads);
        DominanceRow row = run(access, threads <= 1, threads);
        row.mode = "cold";
        row.threads = threads;
        row.lookups = access.lookups_performed();
        row.ratio_vs_warm = warm_total > 0 ? row.total_ms / warm_total : 0;
        rows.push_back(row);
    }
    return rows;
}

std::string dominance_csv(const std::vector<DominanceRow>& rows) {
    std::ostringstream out;
    out << "mode,threads,virtual_us,wall_us,total_ms,lookups,ratio_vs_warm\n";
    out.precision(6);
    for (const auto& r : rows) {
        out << r.mode << ',' << r.threads << ',' << r.virtual_us << ',' << r.wall_us << ','
            << std::fixed << r.total_ms << ',' << r.lookups << ',' << r.ratio_vs_warm << '\n';
        out.unsetf(std::ios_base::fixed);
    }
    return out.str();
}

namespace {

ComparisonRow compare_strategy(
    const std::string& strategy,
    const std::map<std::string, std::map<std::string, double>>& baseline_by_case_metric,
    const std::map<std::string, std::map<std::string, double>>& strategy_by_case_metric) {
    ComparisonRow row;
    row.strategy = strategy;
    for (const char* metric : {"relRT1st", "relRT50", "relRTCmpl"}) {
        int worse = 0;
        int better = 0;
        int cases = 0;
        int excluded = 0;
        for (const auto& [case_key, metrics] : strategy_by_case_metric) {
            auto vit = metrics.find(metric);
            auto bcase = baseline_by_case_metric.find(case_key);
            if (vit == metrics.end() || bcase == baseline_by_case_metric.end() ||
                bcase->second.find(metric) == bcase->second.end()) {
                ++excluded;
                continue;
            }
            const double v = vit->second;
            const double b = bcase->second.at(metric);
            ++cases;
            if (v >= 1.1 * b && v > b) ++worse;
            else if (v <= 0.9 * b && v < b) ++better;
        }
        row.pct[metric] = {cases > 0 ? 100.0 * worse / cases : 0.0,
                           cases > 0 ? 100.0 * better / cases : 0.0};
        row.cases = cases;
        row.excluded = excluded;
    }
    return row;
}

std::vector<ComparisonRow> compare_subset(const std::vector<ExperimentCell>& cells,
                                          const std::function<bool(const ExperimentCell&)>& in_subset) {
    // case key = (web, query, policy)
    std::map<std::string, std::map<std::string, std::map<std::string, double>>> by_strategy;
    for (const ExperimentCell& c : cells) {
        if (!c.gmean || !in_subset(c)) continue;
        std::string case_key = c.web + "\x1f" + c.query + "\x1f" + c.policy;
        by_strategy[c.strategy][case_key][c.metric] = *c.gmean;
    }
    auto base_it = by_strategy.find("baseline");
    static const std::map<std::string, std::map<std::string, double>> empty;
    const auto& baseline = base_it == by_strategy.end() ? empty : base_it->second;

    std::vector<ComparisonRow> rows;
    for (StrategyKind kind : all_strategies()) {
        std::string name = strategy_name(kind);
        if (name == "baseline") continue;
        auto it = by_strategy.find(name);
        if (it == by_strategy.end()) continue;
        rows.push_back(compare_strategy(name, baseline, it->second));
    }
    return rows;
}

}  // namespace

ComparisonReport comparison_report(const std::vector<ExperimentCell>& cells,
                                   const std::map<std::string, double>& web_phi1) {
    ComparisonReport report;
    report.overall = compare_subset(cells, [](const ExperimentCell&) { return true; });
    if (!web_phi1.empty()) {
        report.dense = compare_subset(cells, [&](const ExperimentCell& c) {
            auto it = web_phi1.find(c.web);
            return it != web_phi1.end() && it->second >= 0.66;
        });
        report.sparse = compare_subset(cells, [&](const ExperimentCell& c) {
            auto it = web_phi1.find(c.web);
            return it != web_phi1.end() && it->second <= 0.33;
        });
    }
    return report;
}

std::string comparison_csv(const ComparisonReport& report) {
    std::ostringstream out;
    out << "subset,strategy,relRT1st_worse,relRT1st_better,relRT50_worse,relRT50_better,"
           "relRTCmpl_worse,relRTCmpl_better,cases,excluded\n";
    out.precision(4);
    auto emit = [&](const std::string& subset, const std::vector<ComparisonRow>& rows) {
        for (const auto& r : rows) {
            out << subset << ',' << r.strategy;
            for (const char* metric : {"relRT1st", "relRT50", "relRTCmpl"}) {
                auto it = r.pct.find(metric);
                if (it == r.pct.end()) out << ",,";
                else out << ',' << it->second.first << ',' << it->second.second;
            }
            out << ',' << r.cases << ',' << r.excluded << '\n';
        }
    };
    emit("all", report.overall);
    emit("phi1>=0.66", report.dense);
    emit("phi1<=0.33", report.sparse);
    return out.str();
}

std::map<std::string, std::int64_t> rcc_dry_run(const WebOfLinkedData& web, const BGPQuery& query,
                                                std::uint64_t seed) {
    EngineConfig cfg;
    cfg.strategy = StrategyKind::Baseline;
    cfg.routing.kind = RoutingPolicyKind::Lr;
    cfg.deterministic = true;
    cfg.seed = seed;
    VirtualClock clock;
    InProcessAccess access(web, clock);
    ExecutionResult result = execute(query, access, cfg);
    return result.rcc;
}

void save_rcc_map(const std::string& path, const std::map<std::string, std::int64_t>& rcc) {
    json j = json::object();
    for (const auto& [u, count] : rcc) j[u] = count;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

std::map<std::string, std::int64_t> load_rcc_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j = json::parse(in);
    std::map<std::string, std::int64_t> rcc;
    for (const auto& [key, value] : j.items()) rcc[key] = value.get<std::int64_t>();
    return rcc;
}

}  // namespace linktrail
