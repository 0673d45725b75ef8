#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "linktrail/engine.hpp"
#include "linktrail/metrics.hpp"
#include "linktrail/testweb.hpp"
#include "linktrail/webmodel.hpp"

namespace linktrail {

struct ExperimentSpec {
    enum class SeedRule { Increment, Fixed };

    struct WebRef {
        std::string name;
        std::string path;
        std::optional<double> phi1;
    };
    struct QueryRef {
        std::string name;
        std::string path;
    };

    std::vector<WebRef> webs;
    std::vector<QueryRef> queries;
    std::vector<StrategyKind> strategies;
    std::vector<std::string> policies;
    int repetitions = 5;
    SeedRule seed_rule = SeedRule::Increment;
    std::uint64_t seed_base = 1;
    bool deterministic = true;
    int lookup_threads = 1;
};

/// Loads a spec from JSON (.json) or YAML (anything else).
ExperimentSpec load_experiment_spec(const std::string& path);

struct ExperimentCell {
    std::string web;
    std::string query;
    std::string strategy;
    std::string policy;
    std::string metric;  // relRT1st | relRT50 | relRTCmpl
    std::optional<double> gmean;
    std::optional<double> stdev;
    int n = 0;
    std::string error;  // non-empty when the cell errored or had no solutions
};

/// Runs the full sweep sequentially with fresh engine state per execution.
/// Repetition i uses seed_base + i (Increment) or seed_base (Fixed).
/// Individual failures are recorded in the cell, never aborting the sweep.
/// `progress`, when set, receives one line per completed cell.
std::vector<ExperimentCell> run_experiment(const ExperimentSpec& spec, std::ostream* progress = nullptr);

/// Header: web,query,strategy,policy,metric,gmean,stdev,n
std::string experiment_csv(const std::vector<ExperimentCell>& cells);
std::vector<ExperimentCell> parse_experiment_csv(const std::string& csv);

struct DominanceRow {
    std::string mode;  // "warm" or "cold"
    int threads = 1;
    std::uint64_t virtual_us = 0;  // simulated retrieval portion
    std::uint64_t wall_us = 0;     // measured local-processing portion
    std::uint64_t lookups = 0;     // lookups reaching the store
    double total_ms = 0;
    double ratio_vs_warm = 0;
};

/// One cache-warm execution (zero lookups) plus one cold execution per
/// thread count; execution time = simulated retrieval time + measured
/// local time, and the ratio column compares against the warm run.
std::vector<DominanceRow> dominance_experiment(const WebOfLinkedData& web, const BGPQuery& query,
                                               const std::vector<int>& threads_list,
                                               std::uint64_t seed = 0);

std::string dominance_csv(const std::vector<DominanceRow>& rows);

struct ComparisonRow {
    std::string strategy;
    // metric -> {pct at least 10% worse, pct at least 10% better}
    std::map<std::string, std::pair<double, double>> pct;
    int cases = 0;
    int excluded = 0;  // cases without a usable baseline value
};

struct ComparisonReport {
    std::vector<ComparisonRow> overall;
    std::vector<ComparisonRow> dense;   // webs with phi1 >= 0.66
    std::vector<ComparisonRow> sparse;  // webs with phi1 <= 0.33
};

/// A case is one (web, query, policy); a strategy counts as worse on a case
/// iff value >= 1.1 x baseline (and strictly greater), better iff
/// value <= 0.9 x baseline (and strictly smaller). The phi1 splits are
/// emitted when the webs' phi1 values are known.
ComparisonReport comparison_report(const std::vector<ExperimentCell>& cells,
                                   const std::map<std::string, double>& web_phi1 = {});

std::string comparison_csv(const ComparisonReport& report);

/// Baseline execution collecting per-document RCCs from solution
/// provenance; equals the ground-truth computation on the same web.
std::map<std::string, std::int64_t> rcc_dry_run(const WebOfLinkedData& web, const BGPQuery& query,
                                                std::uint64_t seed = 0);

void save_rcc_map(const std::string& path, const std::map<std::string, std::int64_t>& rcc);
std::map<std::string, std::int64_t> load_rcc_map(const std::string& path);

}  // namespace linktrail
