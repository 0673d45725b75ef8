#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "linktrail/priority.hpp"
#include "linktrail/rdf.hpp"
#include "linktrail/webmodel.hpp"

namespace linktrail {

/// A partial result flowing through the operator network: bindings, one
/// Covered bit per triple pattern, the timestamp that drives the
/// duplicate-avoidance rule, and the documents that contributed matching
/// triples.
struct IntermediateSolution {
    SolutionMapping mapping;
    std::vector<bool> covered;
    std::uint64_t timestamp = 0;
    std::set<std::string> provenance;

    int covered_count() const {
        int n = 0;
        for (bool b : covered) n += b ? 1 : 0;
        return n;
    }
    bool fully_covered() const {
        for (bool b : covered) {
            if (!b) return false;
        }
        return true;
    }
};

enum class RoutingPolicyKind { Lr, LrLi, LrMi, LrMc, LrMcLi, LrMcMi, LrMcLs, LrMcMs, Static };

struct RoutingPolicy {
    RoutingPolicyKind kind = RoutingPolicyKind::Lr;
    std::vector<std::size_t> static_order;  // Static only; permutation of pattern indices
};

/// Accepts "lr", "lr-li", "lr-mi", "lr-mc", "lr-mc-li", "lr-mc-mi",
/// "lr-mc-ls", "lr-mc-ms", "static" (textual pattern order) or
/// "static:2,0,1".
std::optional<RoutingPolicy> routing_policy_from_name(const std::string& name, std::size_t n_patterns);
std::string routing_policy_name(const RoutingPolicy& policy);

/// Dispatcher-visible state of one triple-pattern operator.
struct TPOpView {
    const TriplePattern* pattern = nullptr;
    std::uint64_t index_size = 0;
    std::uint64_t received = 0;  // incoming intermediate solutions processed
    std::uint64_t emitted = 0;   // intermediate solutions returned
};

/// Applies the policy's nested filters to the operators whose Covered bit
/// is unset (`candidates` holds their pattern indices). Never returns an
/// empty set; remaining ties are the caller's to break.
std::vector<std::size_t> policy_filter(const RoutingPolicy& policy, const IntermediateSolution& is,
                                       const std::vector<TPOpView>& ops,
                                       const std::vector<std::size_t>& candidates);

/// Per-pattern matches of a document plus the URIs the reachability
/// condition schedules for lookup (minus already-known ones).
struct ScanResult {
    std::vector<std::pair<std::size_t, Triple>> matching;
    std::set<Term> to_schedule;
};

ScanResult scan_document(const Document& doc, const BGPQuery& query, const std::set<Term>& already_known);

struct EngineConfig {
    StrategyKind strategy = StrategyKind::Baseline;
    std::map<std::string, std::int64_t> oracle_rcc;  // Oracle strategy input
    RoutingPolicy routing;
    int lookup_threads = 1;
    bool set_semantics = false;
    bool deterministic = true;  // forces lookup_threads = 1
    std::uint64_t seed = 0;
    bool audit_pops = false;
    std::function<void(const SolutionMapping&, std::uint64_t t_us)> on_solution;
    std::function<void(const Term& uri, bool ok)> on_lookup;
};

struct TraceEvent {
    enum class Kind { ExecStart, LookupStart, LookupDone, SolutionEmitted, RetrievalComplete, ExecEnd };
    Kind kind = Kind::ExecStart;
    std::uint64_t t_us = 0;
    std::optional<Term> uri;        // LookupStart / LookupDone
    std::optional<std::uint64_t> n; // LookupDone: triple count; SolutionEmitted: ordinal
    bool ok = true;                 // LookupDone: whether the lookup succeeded
};

struct ExecutionTrace {
    std::vector<TraceEvent> events;

    std::uint64_t t_start() const;
    std::uint64_t t_end() const;
    std::vector<std::uint64_t> solution_times() const;
};

std::string trace_to_jsonl(const ExecutionTrace& trace);

struct Solution {
    SolutionMapping mapping;
    std::set<std::string> provenance;
    std::uint64_t t_us = 0;
};

/// Queue snapshot taken as a URI is popped for lookup (audit mode).
struct PopAudit {
    Term uri;
    Priority priority = 0;
    std::vector<LookupQueue::Entry> queued;  // remaining entries after the pop
};

struct ExecutionResult {
    std::vector<Solution> solutions;
    ExecutionTrace trace;
    std::vector<Term> lookup_order;       // popped URIs in order
    std::set<Term> retrieved;             // successful lookups
    std::map<std::string, std::int64_t> rcc;  // final per-document counters
    std::string linkgraph_dot;
    std::vector<PopAudit> audits;
    /// Number of pops completed when the first solution-provenance feedback
    /// was applied; nullopt when no solution was produced.
    std::optional<std::size_t> pops_before_first_feedback;
    std::uint64_t dispatcher_processed = 0;
    std::uint64_t reprioritizations = 0;
    std::uint64_t unknown_rcc_bumps = 0;
};

/// Runs the full operator network over the given web access. Deterministic
/// mode executes everything on the calling thread with a fixed schedule;
/// otherwise each operator runs on its own thread and the data-retrieval
/// operator uses cfg.lookup_threads concurrent lookup workers.
ExecutionResult execute(const BGPQuery& query, WebAccess& web, const EngineConfig& cfg);

}  // namespace linktrail
