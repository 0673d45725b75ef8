#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "linktrail/linkgraph.hpp"
#include "linktrail/rdf.hpp"
#include "linktrail/rng.hpp"

namespace linktrail {

using Priority = double;  // higher = looked up sooner

/// Max-priority queue over URIs with first-come, first-served tie-breaking.
/// A URI appears at most once; update-key preserves the arrival sequence
/// number, so a reprioritization to the same value never changes order.
class LookupQueue {
public:
    struct Entry {
        Term uri;
        Priority priority;
        std::uint64_t seq;
    };

    bool empty() const { return ordered_.empty(); }
    std::size_t size() const { return ordered_.size(); }
    bool contains(const Term& u) const { return by_uri_.count(u) > 0; }

    std::optional<Priority> priority_of(const Term& u) const;

    void push(const Term& u, Priority p);
    void update(const Term& u, Priority p);
    Entry pop();

    std::vector<Entry> snapshot() const;

private:
    struct Cmp {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.priority != b.priority) return a.priority > b.priority;
            return a.seq < b.seq;
        }
    };
    std::set<Entry, Cmp> ordered_;
    std::map<Term, std::set<Entry, Cmp>::iterator> by_uri_;
    std::uint64_t next_seq_ = 0;
};

enum class StrategyKind {
    Baseline,
    Random,
    Dfs,
    Bfs,
    Oracle,
    PageRank,
    Indegree,
    Is,
    Isdcr,
    Rcc1,
    Rcc2,
    Rel1,
    Rel2,
    Isrcc1,
    Isrcc2,
    Isrel1,
    Isrel2,
};

std::optional<StrategyKind> strategy_from_name(const std::string& name);
std::string strategy_name(StrategyKind kind);
std::vector<StrategyKind> all_strategies();

/// How a URI entered the queue.
struct DiscoveryContext {
    std::optional<Term> parent_uri;
    Priority parent_priority = 0;  // priority the parent held when popped
    bool is_seed = false;
};

struct FeedbackMessage {
    enum class Kind { IntermediateSolution, SolutionProvenance };
    Kind kind = Kind::IntermediateSolution;
    SolutionMapping mapping;             // IntermediateSolution
    int covered_count = 0;               // IntermediateSolution
    std::set<std::string> provenance;    // SolutionProvenance
};

struct Reprioritization {
    Term uri;
    Priority priority;
};

/// Read-only view the strategies work against. The link graph is kept up
/// to date by the data-retrieval operator before strategy hooks run.
struct StrategyEnv {
    const LinkGraph* graph = nullptr;
    const LookupQueue* queue = nullptr;
    SplitMix64* rng = nullptr;
};

class Strategy {
public:
    virtual ~Strategy() = default;

    virtual Priority initial_priority(const Term& u, const DiscoveryContext& ctx, StrategyEnv& env) = 0;

    /// Called after a lookup completed (graph already updated). Returns new
    /// priorities for queued URIs whose score changed.
    virtual std::vector<Reprioritization> on_lookup_complete(const Term& u, StrategyEnv& env) {
        (void)u;
        (void)env;
        return {};
    }

    /// Called for each drained feedback message. Solution-provenance RCC
    /// bumps are applied to the graph before this hook runs.
    virtual std::vector<Reprioritization> on_feedback(const FeedbackMessage& msg, StrategyEnv& env) {
        (void)msg;
        (void)env;
        return {};
    }

    /// Called when a URI leaves the queue for lookup.
    virtual void on_popped(const Term& u) { (void)u; }

    virtual bool wants_feedback() const { return false; }
};

/// oracle_rcc is required for StrategyKind::Oracle and ignored otherwise.
std::unique_ptr<Strategy> make_strategy(StrategyKind kind,
                                        std::map<std::string, std::int64_t> oracle_rcc = {});

}  // namespace linktrail
