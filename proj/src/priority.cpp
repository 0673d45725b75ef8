#include "linktrail/priority.hpp"

#include <cassert>
#include <functional>
#include <stdexcept>

namespace linktrail {

std::optional<Priority> LookupQueue::priority_of(const Term& u) const {
    auto it = by_uri_.find(u);
    if (it == by_uri_.end()) return std::nullopt;
    return it->second->priority;
}

void LookupQueue::push(const Term& u, Priority p) {
    assert(!contains(u));
    auto [it, ok] = ordered_.insert(Entry{u, p, next_seq_++});
    (void)ok;
    by_uri_[u] = it;
}

void LookupQueue::update(const Term& u, Priority p) {
    auto it = by_uri_.find(u);
    if (it == by_uri_.end()) return;
    Entry e = *it->second;
    if (e.priority == p) return;
    ordered_.erase(it->second);
    e.priority = p;
    auto [nit, ok] = ordered_.insert(e);
    (void)ok;
    it->second = nit;
}

LookupQueue::Entry LookupQueue::pop() {
    if (ordered_.empty()) throw std::logic_error("pop on empty lookup queue");
    Entry e = *ordered_.begin();
    ordered_.erase(ordered_.begin());
    by_uri_.erase(e.uri);
    return e;
}

std::vector<LookupQueue::Entry> LookupQueue::snapshot() const {
    return {ordered_.begin(), ordered_.end()};
}

std::optional<StrategyKind> strategy_from_name(const std::string& name) {
    static const std::map<std::string, StrategyKind> table = {
        {"baseline", StrategyKind::Baseline}, {"random", StrategyKind::Random},
        {"dfs", StrategyKind::Dfs},           {"bfs", StrategyKind::Bfs},
        {"oracle", StrategyKind::Oracle},     {"pagerank", StrategyKind::PageRank},
        {"indegree", StrategyKind::Indegree}, {"is", StrategyKind::Is},
        {"isdcr", StrategyKind::Isdcr},       {"rcc1", StrategyKind::Rcc1},
        {"rcc2", StrategyKind::Rcc2},         {"rel1", StrategyKind::Rel1},
        {"rel2", StrategyKind::Rel2},         {"isrcc1", StrategyKind::Isrcc1},
        {"isrcc2", StrategyKind::Isrcc2},     {"isrel1", StrategyKind::Isrel1},
        {"isrel2", StrategyKind::Isrel2},
    };
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

std::string strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Baseline: return "baseline";
        case StrategyKind::Random: return "random";
        case StrategyKind::Dfs: return "dfs";
        case StrategyKind::Bfs: return "bfs";
        case StrategyKind::Oracle: return "oracle";
        case StrategyKind::PageRank: return "pagerank";
        case StrategyKind::Indegree: return "indegree";
        case StrategyKind::Is: return "is";
        case StrategyKind::Isdcr: return "isdcr";
        case StrategyKind::Rcc1: return "rcc1";
        case StrategyKind::Rcc2: return "rcc2";
        case StrategyKind::Rel1: return "rel1";
        case StrategyKind::Rel2: return "rel2";
        case StrategyKind::Isrcc1: return "isrcc1";
        case StrategyKind::Isrcc2: return "isrcc2";
        case StrategyKind::Isrel1: return "isrel1";
        case StrategyKind::Isrel2: return "isrel2";
    }
    return "?";
}

std::vector<StrategyKind> all_strategies() {
    return {StrategyKind::Baseline, StrategyKind::Random, StrategyKind::Dfs,
            StrategyKind::Bfs,      StrategyKind::Oracle, StrategyKind::PageRank,
            StrategyKind::Indegree, StrategyKind::Is,     StrategyKind::Isdcr,
            StrategyKind::Rcc1,     StrategyKind::Rcc2,   StrategyKind::Rel1,
            StrategyKind::Rel2,     StrategyKind::Isrcc1, StrategyKind::Isrcc2,
            StrategyKind::Isrel1,   StrategyKind::Isrel2};
}

namespace {

/// URIs bound by a mapping (the ones IS-style feedback acts on).
std::vector<Term> bound_uris(const SolutionMapping& mu) {
    std::vector<Term> uris;
    for (const auto& [var, term] : mu.bindings) {
        if (term.is_uri()) uris.push_back(term);
    }
    return uris;
}

class BaselineStrategy : public Strategy {
public:
    Priority initial_priority(const Term&, const DiscoveryContext&, StrategyEnv&) override { return 0; }
};

class RandomStrategy : public Strategy {
public:
    Priority initial_priority(const Term&, const DiscoveryContext&, StrategyEnv& env) override {
        return static_cast<Priority>(env.rng->next_int(1, 10));
    }
};

class DfsStrategy : public Strategy {
public:
    Priority initial_priority(const Term&, const DiscoveryContext& ctx, StrategyEnv&) override {
        return ctx.is_seed ? 0 : ctx.parent_priority + 1;
    }
};

class BfsStrategy : public Strategy {
public:
    Priority initial_priority(const Term&, const DiscoveryContext& ctx, StrategyEnv&) override {
        return ctx.is_seed ? 0 : ctx.parent_priority - 1;
    }
};

class OracleStrategy : public Strategy {
public:
    explicit OracleStrategy(std::map<std::string, std::int64_t> rcc) : rcc_(std::move(rcc)) {}

    Priority initial_priority(const Term& u, const DiscoveryContext&, StrategyEnv&) override {
        auto it = rcc_.find(u.lexical);
        return it == rcc_.end() ? 0 : static_cast<Priority>(it->second);
    }

private:
    std::map<std::string, std::int64_t> rcc_;
};

/// Reprioritizes every queued URI whose score differs from its current
/// priority. Shared by the graph-based and hybrid strategies.
std::vector<Reprioritization> rescore_queue(StrategyEnv& env,
                                            const std::function<Priority(const Term&)>& score) {
    std::vector<Reprioritization> out;
    for (const auto& entry : env.queue->snapshot()) {
        Priority p = score(entry.uri);
        if (p != entry.priority) out.push_back({entry.uri, p});
    }
    return out;
}

class IndegreeStrategy : public Strategy {
public:
    Priority initial_priority(const Term&, const DiscoveryContext&, StrategyEnv&) override { return 0; }

    std::vector<Reprioritization> on_lookup_complete(const Term&, StrategyEnv& env) override {
        return rescore_queue(env, [&](const Term& u) {
            return static_cast<Priority>(env.graph->indegree(u));
        });
    }
};

class PageRankStrategy : public Strategy {
public:
    Priority initial_priority(const Term&, const DiscoveryContext&, StrategyEnv&) override { return 0; }

    std::vector<Reprioritization> on_lookup_complete(const Term&, StrategyEnv& env) override {
        auto scores = env.graph->pagerank();
        return rescore_queue(env, [&](const Term& u) {
            auto it = scores.find(u);
            return it == scores.end() ? 0.0 : it->second;
        });
    }
};

class IsStrategy : public Strategy {
public:
    explicit IsStrategy(bool decreasing_start) : decreasing_start_(decreasing_start) {}

    Priority initial_priority(const Term&, const DiscoveryContext& ctx, StrategyEnv&) override {
        if (!decreasing_start_) return 0;
        return ctx.is_seed ? 0 : ctx.parent_priority - 1;
    }

    std::vector<Reprioritization> on_feedback(const FeedbackMessage& msg, StrategyEnv& env) override {
        std::vector<Reprioritization> out;
        if (msg.kind != FeedbackMessage::Kind::IntermediateSolution) return out;
        const Priority cnt = static_cast<Priority>(msg.covered_count);
        std::set<Term> seen;
        for (const Term& u : bound_uris(msg.mapping)) {
            if (!seen.insert(u).second) continue;
            auto current = env.queue->priority_of(u);
            if (current && *current < cnt) out.push_back({u, cnt});
        }
        return out;
    }

    bool wants_feedback() const override { return true; }

private:
    bool decreasing_start_;
};

enum class GraphScore { Rcc1, Rcc2, Rel1, Rel2 };

Priority graph_score(const LinkGraph& g, const Term& u, GraphScore which) {
    switch (which) {
        case GraphScore::Rcc1: return static_cast<Priority>(g.rcc_score(u, 1));
        case GraphScore::Rcc2: return static_cast<Priority>(g.rcc_score(u, 2));
        case GraphScore::Rel1: return static_cast<Priority>(g.rel_score(u, 1));
        case GraphScore::Rel2: return static_cast<Priority>(g.rel_score(u, 2));
    }
    return 0;
}

/// Solution-aware graph-based strategies (rcc1/rcc2/rel1/rel2): scores are
/// zero until the first solution's provenance arrives, so these behave like
/// the baseline up to that point.
class SolutionAwareStrategy : public Strategy {
public:
    explicit SolutionAwareStrategy(GraphScore which) : which_(which) {}

    Priority initial_priority(const Term&, const DiscoveryContext&, StrategyEnv&) override { return 0; }

    std::vector<Reprioritization> on_lookup_complete(const Term&, StrategyEnv& env) override {
        return rescore(env);
    }

    std::vector<Reprioritization> on_feedback(const FeedbackMessage& msg, StrategyEnv& env) override {
        if (msg.kind != FeedbackMessage::Kind::SolutionProvenance) return {};
        return rescore(env);
    }

    bool wants_feedback() const override { return true; }

private:
    std::vector<Reprioritization> rescore(StrategyEnv& env) {
        return rescore_queue(env, [&](const Term& u) { return graph_score(*env.graph, u, which_); });
    }

    GraphScore which_;
};

/// Hybrids: priority = IS-score(uri) * graph score(uri), where the IS-score
/// is the running max of covered-bit counts over intermediate solutions
/// binding the URI while queued.
class HybridStrategy : public Strategy {
public:
    explicit HybridStrategy(GraphScore which) : which_(which) {}

    Priority initial_priority(const Term& u, const DiscoveryContext&, StrategyEnv&) override {
        is_score_.emplace(u, 0);
        return 0;
    }

    std::vector<Reprioritization> on_lookup_complete(const Term&, StrategyEnv& env) override {
        return rescore(env);
    }

    std::vector<Reprioritization> on_feedback(const FeedbackMessage& msg, StrategyEnv& env) override {
        if (msg.kind == FeedbackMessage::Kind::IntermediateSolution) {
            for (const Term& u : bound_uris(msg.mapping)) {
                auto it = is_score_.find(u);
                if (it != is_score_.end() && it->second < msg.covered_count) {
                    it->second = msg.covered_count;
                }
            }
        }
        return rescore(env);
    }

    void on_popped(const Term& u) override { is_score_.erase(u); }

    bool wants_feedback() const override { return true; }

private:
    std::vector<Reprioritization> rescore(StrategyEnv& env) {
        return rescore_queue(env, [&](const Term& u) {
            auto it = is_score_.find(u);
            const Priority is_score = it == is_score_.end() ? 0 : static_cast<Priority>(it->second);
            return is_score * graph_score(*env.graph, u, which_);
        });
    }

    GraphScore which_;
    std::map<Term, int> is_score_;
};

}  // namespace

std::unique_ptr<Strategy> make_strategy(StrategyKind kind, std::map<std::string, std::int64_t> oracle_rcc) {
    switch (kind) {
        case StrategyKind::Baseline: return std::make_unique<BaselineStrategy>();
        case StrategyKind::Random: return std::make_unique<RandomStrategy>();
        case StrategyKind::Dfs: return std::make_unique<DfsStrategy>();
        case StrategyKind::Bfs: return std::make_unique<BfsStrategy>();
        case StrategyKind::Oracle: return std::make_unique<OracleStrategy>(std::move(oracle_rcc));
        case StrategyKind::PageRank: return std::make_unique<PageRankStrategy>();
        case StrategyKind::Indegree: return std::make_unique<IndegreeStrategy>();
        case StrategyKind::Is: return std::make_unique<IsStrategy>(false);
        case StrategyKind::Isdcr: return std::make_unique<IsStrategy>(true);
        case StrategyKind::Rcc1: return std::make_unique<SolutionAwareStrategy>(GraphScore::Rcc1);
        case StrategyKind::Rcc2: return std::make_unique<SolutionAwareStrategy>(GraphScore::Rcc2);
        case StrategyKind::Rel1: return std::make_unique<SolutionAwareStrategy>(GraphScore::Rel1);
        case StrategyKind::Rel2: return std::make_unique<SolutionAwareStrategy>(GraphScore::Rel2);
        case StrategyKind::Isrcc1: return std::make_unique<HybridStrategy>(GraphScore::Rcc1);
        case StrategyKind::Isrcc2: return std::make_unique<HybridStrategy>(GraphScore::Rcc2);
        case StrategyKind::Isrel1: return std::make_unique<HybridStrategy>(GraphScore::Rel1);
        case StrategyKind::Isrel2: return std::make_unique<HybridStrategy>(GraphScore::Rel2);
    }
    throw std::logic_error("unknown strategy kind");
}

}  // namespace linktrail
