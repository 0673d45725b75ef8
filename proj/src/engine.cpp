#include "linktrail/engine.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <condition_variable>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace linktrail {

// ---------------------------------------------------------------------------
// routing policies

std::optional<RoutingPolicy> routing_policy_from_name(const std::string& name, std::size_t n_patterns) {
    RoutingPolicy p;
    if (name == "lr") p.kind = RoutingPolicyKind::Lr;
    else if (name == "lr-li") p.kind = RoutingPolicyKind::LrLi;
    else if (name == "lr-mi") p.kind = RoutingPolicyKind::LrMi;
    else if (name == "lr-mc") p.kind = RoutingPolicyKind::LrMc;
    else if (name == "lr-mc-li") p.kind = RoutingPolicyKind::LrMcLi;
    else if (name == "lr-mc-mi") p.kind = RoutingPolicyKind::LrMcMi;
    else if (name == "lr-mc-ls") p.kind = RoutingPolicyKind::LrMcLs;
    else if (name == "lr-mc-ms") p.kind = RoutingPolicyKind::LrMcMs;
    else if (name == "static" || name.rfind("static:", 0) == 0) {
        p.kind = RoutingPolicyKind::Static;
        if (name == "static") {
            for (std::size_t i = 0; i < n_patterns; ++i) p.static_order.push_back(i);
        } else {
            std::stringstream ss(name.substr(7));
            std::string part;
            while (std::getline(ss, part, ',')) p.static_order.push_back(std::stoul(part));
            std::vector<bool> seen(n_patterns, false);
            if (p.static_order.size() != n_patterns) return std::nullopt;
            for (std::size_t i : p.static_order) {
                if (i >= n_patterns || seen[i]) return std::nullopt;
                seen[i] = true;
            }
        }
    } else {
        return std::nullopt;
    }
    return p;
}

std::string routing_policy_name(const RoutingPolicy& policy) {
    switch (policy.kind) {
        case RoutingPolicyKind::Lr: return "lr";
        case RoutingPolicyKind::LrLi: return "lr-li";
        case RoutingPolicyKind::LrMi: return "lr-mi";
        case RoutingPolicyKind::LrMc: return "lr-mc";
        case RoutingPolicyKind::LrMcLi: return "lr-mc-li";
        case RoutingPolicyKind::LrMcMi: return "lr-mc-mi";
        case RoutingPolicyKind::LrMcLs: return "lr-mc-ls";
        case RoutingPolicyKind::LrMcMs: return "lr-mc-ms";
        case RoutingPolicyKind::Static: {
            std::string s = "static:";
            for (std::size_t i = 0; i < policy.static_order.size(); ++i) {
                if (i) s += ',';
                s += std::to_string(policy.static_order[i]);
            }
            return s;
        }
    }
    return "?";
}

namespace {

int bound_var_count(const TriplePattern& p, const SolutionMapping& mu) {
    int n = 0;
    for (const std::string& v : p.variables()) {
        if (mu.binds(v)) ++n;
    }
    return n;
}

int unbound_var_count(const TriplePattern& p, const SolutionMapping& mu) {
    return p.variable_count() - bound_var_count(p, mu);
}

double op_selectivity(const TPOpView& v) {
    if (v.emitted == 0) {
        return v.received == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return static_cast<double>(v.received) / static_cast<double>(v.emitted);
}

template <typename KeyFn>
std::vector<std::size_t> keep_extreme(const std::vector<std::size_t>& candidates, KeyFn key, bool want_max) {
    std::vector<std::size_t> out;
    for (std::size_t c : candidates) {
        if (out.empty()) {
            out.push_back(c);
            continue;
        }
        auto best = key(out.front());
        auto cur = key(c);
        if (cur == best) {
            out.push_back(c);
        } else if (want_max ? cur > best : cur < best) {
            out.clear();
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace

std::vector<std::size_t> policy_filter(const RoutingPolicy& policy, const IntermediateSolution& is,
                                       const std::vector<TPOpView>& ops,
                                       const std::vector<std::size_t>& candidates) {
    assert(!candidates.empty());

    if (policy.kind == RoutingPolicyKind::Static) {
        for (std::size_t i : policy.static_order) {
            for (std::size_t c : candidates) {
                if (c == i) return {i};
            }
        }
        return {candidates.front()};  // unreachable for a valid permutation
    }

    auto unbound = [&](std::size_t i) { return unbound_var_count(*ops[i].pattern, is.mapping); };
    auto bound = [&](std::size_t i) { return bound_var_count(*ops[i].pattern, is.mapping); };
    auto index_size = [&](std::size_t i) { return ops[i].index_size; };
    auto selectivity = [&](std::size_t i) { return op_selectivity(ops[i]); };

    std::vector<std::size_t> c = keep_extreme(candidates, unbound, /*want_max=*/false);
    switch (policy.kind) {
        case RoutingPolicyKind::Lr: break;
        case RoutingPolicyKind::LrLi: c = keep_extreme(c, index_size, false); break;
        case RoutingPolicyKind::LrMi: c = keep_extreme(c, index_size, true); break;
        case RoutingPolicyKind::LrMc: c = keep_extreme(c, bound, true); break;
        case RoutingPolicyKind::LrMcLi:
            c = keep_extreme(c, bound, true);
            c = keep_extreme(c, index_size, false);
            break;
        case RoutingPolicyKind::LrMcMi:
            c = keep_extreme(c, bound, true);
            c = keep_extreme(c, index_size, true);
            break;
        case RoutingPolicyKind::LrMcLs:
            c = keep_extreme(c, bound, true);
            c = keep_extreme(c, selectivity, false);
            break;
        case RoutingPolicyKind::LrMcMs:
            c = keep_extreme(c, bound, true);
            c = keep_extreme(c, selectivity, true);
            break;
        case RoutingPolicyKind::Static: break;
    }
    return c;
}

// ---------------------------------------------------------------------------
// document scanning

ScanResult scan_document(const Document& doc, const BGPQuery& query, const std::set<Term>& already_known) {
    ScanResult out;
    for (const Triple& t : doc.triples) {
        bool matched = false;
        for (std::size_t i = 0; i < query.patterns.size(); ++i) {
            if (match_triple(query.patterns[i], t)) {
                out.matching.emplace_back(i, t);
                matched = true;
            }
        }
        if (!matched) continue;
        for (const Term* pos : {&t.s, &t.p, &t.o}) {
            if (pos->is_uri() && already_known.count(*pos) == 0) out.to_schedule.insert(*pos);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// trace

std::uint64_t ExecutionTrace::t_start() const {
    return events.empty() ? 0 : events.front().t_us;
}

std::uint64_t ExecutionTrace::t_end() const {
    return events.empty() ? 0 : events.back().t_us;
}

std::vector<std::uint64_t> ExecutionTrace::solution_times() const {
    std::vector<std::uint64_t> out;
    for (const TraceEvent& ev : events) {
        if (ev.kind == TraceEvent::Kind::SolutionEmitted) out.push_back(ev.t_us);
    }
    return out;
}

namespace {

const char* event_name(TraceEvent::Kind kind) {
    switch (kind) {
        case TraceEvent::Kind::ExecStart: return "exec_start";
        case TraceEvent::Kind::LookupStart: return "lookup_start";
        case TraceEvent::Kind::LookupDone: return "lookup_done";
        case TraceEvent::Kind::SolutionEmitted: return "solution_emitted";
        case TraceEvent::Kind::RetrievalComplete: return "retrieval_complete";
        case TraceEvent::Kind::ExecEnd: return "exec_end";
    }
    return "?";
}

}  // namespace

std::string trace_to_jsonl(const ExecutionTrace& trace) {
    std::string out;
    for (const TraceEvent& ev : trace.events) {
        nlohmann::ordered_json j;
        j["event"] = event_name(ev.kind);
        j["t"] = ev.t_us;
        if (ev.uri) j["uri"] = ev.uri->lexical;
        if (ev.n) j["n"] = *ev.n;
        if (!ev.ok) j["ok"] = false;
        out += j.dump();
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// operators

namespace {

/// Triple-pattern operator: indexes the initial intermediate solutions
/// generated from its matching triples and joins incoming intermediate
/// solutions against that index. An indexed entry qualifies as a join
/// candidate only when its timestamp is older than the incoming one and
/// the bindings agree; the first condition makes each logical join happen
/// exactly once across the whole network.
class TPOp {
public:
    TPOp(const TriplePattern& pattern, std::size_t index, std::size_t n_patterns, bool set_semantics)
        : pattern_(pattern), self_(index), n_patterns_(n_patterns), set_semantics_(set_semantics) {}

    std::optional<IntermediateSolution> ingest(const Triple& t, const std::string& doc,
                                               std::atomic<std::uint64_t>& ts_counter) {
        auto mu = match_triple(pattern_, t);
        assert(mu.has_value());
        if (set_semantics_ && !seen_.insert(*mu).second) return std::nullopt;

        IntermediateSolution is;
        is.mapping = std::move(*mu);
        is.covered.assign(n_patterns_, false);
        is.covered[self_] = true;
        is.timestamp = ts_counter.fetch_add(1, std::memory_order_relaxed);
        is.provenance = {doc};

        initials_.push_back(is);
        const IntermediateSolution* stored = &initials_.back();
        for (const auto& [var, term] : stored->mapping.bindings) {
            index_[{var, term}].push_back(stored);
        }
        index_size_.store(initials_.size(), std::memory_order_relaxed);
        return is;
    }

    std::vector<IntermediateSolution> probe(const IntermediateSolution& incoming) {
        if (incoming.covered[self_]) {
            throw std::logic_error("intermediate solution routed to an operator that already covered it");
        }
        received_.fetch_add(1, std::memory_order_relaxed);

        // candidates sharing a binding come from the index; an incoming
        // solution with no shared variable joins against every entry
        const std::vector<const IntermediateSolution*>* bucket = nullptr;
        std::vector<const IntermediateSolution*> all;
        bool shared_var = false;
        for (const std::string& v : pattern_.variables()) {
            const Term* bound = incoming.mapping.get(v);
            if (bound == nullptr) continue;
            shared_var = true;
            auto it = index_.find({v, *bound});
            bucket = it == index_.end() ? nullptr : &it->second;
            break;
        }
        if (!shared_var) {
            all.reserve(initials_.size());
            for (const IntermediateSolution& is : initials_) all.push_back(&is);
            bucket = &all;
        }

        std::vector<IntermediateSolution> out;
        if (bucket == nullptr) return out;
        for (const IntermediateSolution* cand : *bucket) {
            if (cand->timestamp >= incoming.timestamp) continue;
            auto merged = merge_compatible(cand->mapping, incoming.mapping);
            if (!merged) continue;
            IntermediateSolution is;
            is.mapping = std::move(*merged);
            is.covered = incoming.covered;
            is.covered[self_] = true;
            is.timestamp = incoming.timestamp;
            is.provenance = incoming.provenance;
            is.provenance.insert(cand->provenance.begin(), cand->provenance.end());
            out.push_back(std::move(is));
        }
        emitted_.fetch_add(out.size(), std::memory_order_relaxed);
        return out;
    }

    TPOpView view() const {
        return TPOpView{&pattern_, index_size_.load(std::memory_order_relaxed),
                        received_.load(std::memory_order_relaxed),
                        emitted_.load(std::memory_order_relaxed)};
    }

private:
    TriplePattern pattern_;
    std::size_t self_;
    std::size_t n_patterns_;
    bool set_semantics_;
    std::deque<IntermediateSolution> initials_;
    std::map<std::pair<std::string, Term>, std::vector<const IntermediateSolution*>> index_;
    std::set<SolutionMapping> seen_;
    std::atomic<std::uint64_t> index_size_{0};
    std::atomic<std::uint64_t> received_{0};
    std::atomic<std::uint64_t> emitted_{0};
};

struct EngineShared {
    EngineShared(const BGPQuery& q, WebAccess& w, const EngineConfig& c) : query(q), web(w), cfg(c) {}

    const BGPQuery& query;
    WebAccess& web;
    const EngineConfig& cfg;

    std::mutex trace_mu;
    ExecutionTrace trace;
    std::vector<Solution> solutions;
    std::atomic<std::uint64_t> ts_counter{1};

    void record(TraceEvent ev) {
        std::lock_guard<std::mutex> lock(trace_mu);
        ev.t_us = web.now_us();
        trace.events.push_back(std::move(ev));
    }

    void emit_solution(const IntermediateSolution& is) {
        std::lock_guard<std::mutex> lock(trace_mu);
        const std::uint64_t t = web.now_us();
        TraceEvent ev;
        ev.kind = TraceEvent::Kind::SolutionEmitted;
        ev.t_us = t;
        ev.n = solutions.size() + 1;
        trace.events.push_back(std::move(ev));
        solutions.push_back(Solution{is.mapping, is.provenance, t});
        if (cfg.on_solution) cfg.on_solution(is.mapping, t);
    }
};

struct Delivery {
    std::size_t op;
    Triple triple;
    std::string doc;
};

/// Data-retrieval operator state: the strategy-owned lookup queue, the
/// incrementally built link graph, and the bookkeeping shared by both
/// execution drivers. Callers serialize access (the deterministic driver
/// trivially, the concurrent one via a mutex).
class DROp {
public:
    DROp(EngineShared& shared)
        : shared_(shared),
          strategy_(make_strategy(shared.cfg.strategy, shared.cfg.oracle_rcc)),
          strategy_rng_(shared.cfg.seed) {
        env_.graph = &graph_;
        env_.queue = &queue_;
        env_.rng = &strategy_rng_;
    }

    void init_seeds() {
        for (const Term& seed : shared_.query.seeds) {
            attempted_.insert(seed);
            discovered_at_[seed] = 0;
            graph_.add_queued(seed);
            DiscoveryContext ctx;
            ctx.is_seed = true;
            queue_.push(seed, strategy_->initial_priority(seed, ctx, env_));
        }
    }

    bool queue_empty() const { return queue_.empty(); }

    void apply_feedback(const FeedbackMessage& msg) {
        if (msg.kind == FeedbackMessage::Kind::SolutionProvenance) {
            if (!first_feedback_pops_) first_feedback_pops_ = pops_done_;
            graph_.bump_rcc(msg.provenance);
        }
        apply(strategy_->on_feedback(msg, env_));
    }

    struct Popped {
        Term uri;
        Priority priority;
        std::uint64_t discovered_at_us;
    };

    Popped pop_begin() {
        LookupQueue::Entry entry = queue_.pop();
        strategy_->on_popped(entry.uri);
        lookup_order_.push_back(entry.uri);
        if (shared_.cfg.audit_pops) {
            audits_.push_back(PopAudit{entry.uri, entry.priority, queue_.snapshot()});
        }
        TraceEvent ev;
        ev.kind = TraceEvent::Kind::LookupStart;
        ev.uri = entry.uri;
        shared_.record(std::move(ev));
        return Popped{entry.uri, entry.priority, discovered_at_[entry.uri]};
    }

    std::vector<Delivery> pop_finish(const Popped& popped, const LookupResult& lookup) {
        const std::optional<Document>& doc = lookup.document;
        TraceEvent ev;
        ev.kind = TraceEvent::Kind::LookupDone;
        ev.uri = popped.uri;
        ev.ok = doc.has_value();
        if (doc) ev.n = doc->triples.size();
        shared_.record(std::move(ev));
        if (shared_.cfg.on_lookup) shared_.cfg.on_lookup(popped.uri, doc.has_value());

        std::vector<Delivery> deliveries;
        if (!doc) {
            failed_.insert(popped.uri);
            graph_.remove_failed(popped.uri);
        } else {
            retrieved_.insert(popped.uri);
            graph_.promote(popped.uri);

            ScanResult scan = scan_document(*doc, shared_.query, attempted_);

            // every URI in a matching triple becomes graph knowledge, except
            // URIs whose lookup already failed (their vertices are gone)
            for (const auto& [op, t] : scan.matching) {
                (void)op;
                for (const Term* pos : {&t.s, &t.p, &t.o}) {
                    if (!pos->is_uri() || failed_.count(*pos) > 0) continue;
                    graph_.add_discovery(popped.uri, *pos, retrieved_.count(*pos) > 0);
                }
            }
            for (const Term& u : scan.to_schedule) {
                attempted_.insert(u);
                discovered_at_[u] = lookup.completed_at_us;
                DiscoveryContext ctx;
                ctx.parent_uri = popped.uri;
                ctx.parent_priority = popped.priority;
                queue_.push(u, strategy_->initial_priority(u, ctx, env_));
            }
            deliveries.reserve(scan.matching.size());
            for (auto& [op, t] : scan.matching) deliveries.push_back(Delivery{op, std::move(t), popped.uri.lexical});
        }

        ++pops_done_;
        apply(strategy_->on_lookup_complete(popped.uri, env_));
        return deliveries;
    }

    std::map<std::string, std::int64_t> final_rcc() const {
        std::map<std::string, std::int64_t> rcc;
        for (const auto& [u, v] : graph_.vertices()) {
            if (v.kind == LinkGraph::VertexKind::Document) rcc[u.lexical] = v.rcc;
        }
        return rcc;
    }

    const LinkGraph& graph() const { return graph_; }
    const std::set<Term>& retrieved() const { return retrieved_; }
    const std::vector<Term>& lookup_order() const { return lookup_order_; }
    std::vector<PopAudit> take_audits() { return std::move(audits_); }
    std::optional<std::size_t> first_feedback_pops() const { return first_feedback_pops_; }
    std::uint64_t reprioritizations() const { return reprioritizations_; }

private:
    void apply(const std::vector<Reprioritization>& updates) {
        for (const Reprioritization& r : updates) {
            queue_.update(r.uri, r.priority);
            ++reprioritizations_;
        }
    }

    EngineShared& shared_;
    std::unique_ptr<Strategy> strategy_;
    SplitMix64 strategy_rng_;
    StrategyEnv env_;
    LookupQueue queue_;
    LinkGraph graph_;
    std::map<Term, std::uint64_t> discovered_at_;
    std::set<Term> attempted_;
    std::set<Term> retrieved_;
    std::set<Term> failed_;
    std::vector<Term> lookup_order_;
    std::vector<PopAudit> audits_;
    std::size_t pops_done_ = 0;
    std::optional<std::size_t> first_feedback_pops_;
    std::uint64_t reprioritizations_ = 0;
};

/// Routing core: Covered-bit check, policy filtering, seeded tie-breaking,
/// and the feedback messages sent back to data retrieval.
class Dispatcher {
public:
    Dispatcher(EngineShared& shared, std::deque<TPOp>& ops)
        : shared_(shared), ops_(ops), rng_(shared.cfg.seed ^ 0xd1b54a32d192ed03ULL) {}

    /// Returns the target operator index, or nullopt when the intermediate
    /// solution was a full solution (sent to the output).
    std::optional<std::size_t> route(const IntermediateSolution& is,
                                     std::vector<FeedbackMessage>& feedback_out) {
        ++processed_;

        FeedbackMessage info;
        info.kind = FeedbackMessage::Kind::IntermediateSolution;
        info.mapping = is.mapping;
        info.covered_count = is.covered_count();
        feedback_out.push_back(std::move(info));

        if (is.fully_covered()) {
            shared_.emit_solution(is);
            FeedbackMessage prov;
            prov.kind = FeedbackMessage::Kind::SolutionProvenance;
            prov.provenance = is.provenance;
            feedback_out.push_back(std::move(prov));
            return std::nullopt;
        }

        std::vector<std::size_t> candidates;
        for (std::size_t i = 0; i < is.covered.size(); ++i) {
            if (!is.covered[i]) candidates.push_back(i);
        }
        std::vector<TPOpView> views;
        views.reserve(ops_.size());
        for (const TPOp& op : ops_) views.push_back(op.view());

        std::vector<std::size_t> filtered = policy_filter(shared_.cfg.routing, is, views, candidates);
        if (filtered.size() == 1) return filtered.front();
        return filtered[rng_.next() % filtered.size()];
    }

    std::uint64_t processed() const { return processed_; }

private:
    EngineShared& shared_;
    std::deque<TPOp>& ops_;
    SplitMix64 rng_;
    std::uint64_t processed_ = 0;
};

// ---------------------------------------------------------------------------
// deterministic driver: everything on the calling thread. Local processing
// is drained to quiescence between lookups so that, in virtual time, result
// construction is instantaneous relative to data retrieval (the regime the
// whole design assumes).

ExecutionResult run_deterministic(EngineShared& shared) {
    const std::size_t n = shared.query.patterns.size();

    DROp drop(shared);
    std::deque<TPOp> ops;
    for (std::size_t i = 0; i < n; ++i) {
        ops.emplace_back(shared.query.patterns[i], i, n, shared.cfg.set_semantics);
    }
    Dispatcher dispatcher(shared, ops);

    std::vector<std::deque<std::pair<Triple, std::string>>> triple_q(n);
    std::vector<std::deque<IntermediateSolution>> probe_q(n);
    std::deque<IntermediateSolution> dispatch_q;
    std::deque<FeedbackMessage> feedback_q;

    shared.record(TraceEvent{TraceEvent::Kind::ExecStart, 0, {}, {}, true});
    drop.init_seeds();

    auto drain_local = [&] {
        bool progressed = true;
        while (progressed) {
            progressed = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (!triple_q[i].empty()) {
                    auto [t, doc] = std::move(triple_q[i].front());
                    triple_q[i].pop_front();
                    if (auto is = ops[i].ingest(t, doc, shared.ts_counter)) {
                        dispatch_q.push_back(std::move(*is));
                    }
                    progressed = true;
                } else if (!probe_q[i].empty()) {
                    IntermediateSolution incoming = std::move(probe_q[i].front());
                    probe_q[i].pop_front();
                    for (auto& merged : ops[i].probe(incoming)) {
                        dispatch_q.push_back(std::move(merged));
                    }
                    progressed = true;
                }
            }
            if (!dispatch_q.empty()) {
                IntermediateSolution is = std::move(dispatch_q.front());
                dispatch_q.pop_front();
                std::vector<FeedbackMessage> feedback;
                if (auto target = dispatcher.route(is, feedback)) {
                    probe_q[*target].push_back(std::move(is));
                }
                for (auto& msg : feedback) feedback_q.push_back(std::move(msg));
                progressed = true;
            }
        }
    };

    while (true) {
        drain_local();
        while (!feedback_q.empty()) {
            drop.apply_feedback(feedback_q.front());
            feedback_q.pop_front();
        }
        if (drop.queue_empty()) {
            shared.record(TraceEvent{TraceEvent::Kind::RetrievalComplete, 0, {}, {}, true});
            break;
        }
        DROp::Popped popped = drop.pop_begin();
        LookupResult lookup = shared.web.lookup(popped.uri, popped.discovered_at_us);
        for (auto& d : drop.pop_finish(popped, lookup)) {
            triple_q[d.op].emplace_back(std::move(d.triple), std::move(d.doc));
        }
    }
    shared.record(TraceEvent{TraceEvent::Kind::ExecEnd, 0, {}, {}, true});

    ExecutionResult result;
    result.solutions = std::move(shared.solutions);
    result.trace = std::move(shared.trace);
    result.lookup_order = drop.lookup_order();
    result.retrieved = drop.retrieved();
    result.rcc = drop.final_rcc();
    result.linkgraph_dot = drop.graph().to_dot();
    result.audits = drop.take_audits();
    result.pops_before_first_feedback = drop.first_feedback_pops();
    result.dispatcher_processed = dispatcher.processed();
    result.reprioritizations = drop.reprioritizations();
    result.unknown_rcc_bumps = drop.graph().unknown_bumps();
    return result;
}

// ---------------------------------------------------------------------------
// concurrent driver: one thread per operator plus N lookup workers.

template <typename T>
class Channel {
public:
    void push(T value) {
        {
            std::lock_guard<std::mutex> lock(mu_);
            q_.push_back(std::move(value));
        }
        cv_.notify_one();
    }

    bool try_pop(T& out) {
        std::lock_guard<std::mutex> lock(mu_);
        if (q_.empty()) return false;
        out = std::move(q_.front());
        q_.pop_front();
        return true;
    }

    /// Blocks until an item is available or the channel is closed and empty.
    bool pop_wait(T& out, std::atomic<bool>& idle_flag) {
        std::unique_lock<std::mutex> lock(mu_);
        while (q_.empty() && !closed_) {
            idle_flag.store(true, std::memory_order_release);
            cv_.wait(lock);
        }
        idle_flag.store(false, std::memory_order_release);
        if (q_.empty()) return false;
        out = std::move(q_.front());
        q_.pop_front();
        return true;
    }

    void close() {
        {
            std::lock_guard<std::mutex> lock(mu_);
            closed_ = true;
        }
        cv_.notify_all();
    }

    bool empty() const {
        std::lock_guard<std::mutex> lock(mu_);
        return q_.empty();
    }

private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<T> q_;
    bool closed_ = false;
};

/// Two-input inbox of a triple-pattern operator; matching triples are
/// preferred over probe messages.
struct OpInbox {
    mutable std::mutex mu;
    std::condition_variable cv;
    std::deque<std::pair<Triple, std::string>> triples;
    std::deque<IntermediateSolution> probes;
    bool closed = false;
    std::atomic<bool> idle{false};
    std::atomic<std::uint64_t> processed{0};

    void push_triple(Triple t, std::string doc) {
        {
            std::lock_guard<std::mutex> lock(mu);
            triples.emplace_back(std::move(t), std::move(doc));
        }
        cv.notify_one();
    }
    void push_probe(IntermediateSolution is) {
        {
            std::lock_guard<std::mutex> lock(mu);
            probes.push_back(std::move(is));
        }
        cv.notify_one();
    }
    void close() {
        {
            std::lock_guard<std::mutex> lock(mu);
            closed = true;
        }
        cv.notify_all();
    }
    bool both_empty() const {
        std::lock_guard<std::mutex> lock(mu);
        return triples.empty() && probes.empty();
    }
};

ExecutionResult run_concurrent(EngineShared& shared) {
    const std::size_t n = shared.query.patterns.size();
    const int workers = std::max(1, shared.cfg.lookup_threads);

    DROp drop(shared);
    std::deque<TPOp> ops;
    for (std::size_t i = 0; i < n; ++i) {
        ops.emplace_back(shared.query.patterns[i], i, n, shared.cfg.set_semantics);
    }
    Dispatcher dispatcher(shared, ops);

    std::deque<OpInbox> inboxes(n);
    Channel<IntermediateSolution> dispatch_ch;
    Channel<FeedbackMessage> feedback_ch;
    std::atomic<bool> dispatcher_idle{false};
    std::atomic<std::uint64_t> dispatcher_processed_msgs{0};

    std::mutex drop_mu;
    std::condition_variable drop_cv;
    int busy_workers = 0;
    bool retrieval_done = false;
    bool aborted = false;
    std::exception_ptr first_error;

    auto record_error = [&](std::exception_ptr e) {
        std::lock_guard<std::mutex> lock(drop_mu);
        if (!first_error) first_error = e;
        aborted = true;
        drop_cv.notify_all();
    };

    shared.record(TraceEvent{TraceEvent::Kind::ExecStart, 0, {}, {}, true});
    {
        std::lock_guard<std::mutex> lock(drop_mu);
        drop.init_seeds();
    }

    auto worker_fn = [&] {
        std::unique_lock<std::mutex> lock(drop_mu);
        while (true) {
            FeedbackMessage msg;
            while (feedback_ch.try_pop(msg)) drop.apply_feedback(msg);

            if (drop.queue_empty() || aborted) {
                if (busy_workers == 0 || aborted) {
                    if (!retrieval_done) {
                        retrieval_done = true;
                        shared.record(TraceEvent{TraceEvent::Kind::RetrievalComplete, 0, {}, {}, true});
                    }
                    drop_cv.notify_all();
                    return;
                }
                drop_cv.wait(lock);
                continue;
            }

            DROp::Popped popped = drop.pop_begin();
            ++busy_workers;
            lock.unlock();
            LookupResult lookup;
            std::exception_ptr error;
            try {
                lookup = shared.web.lookup(popped.uri, popped.discovered_at_us);
            } catch (...) {
                error = std::current_exception();
                lookup = LookupResult{};  // recorded as a failed lookup
            }
            lock.lock();
            if (error && !first_error) {
                first_error = error;
                aborted = true;
            }
            std::vector<Delivery> deliveries = drop.pop_finish(popped, lookup);
            for (auto& d : deliveries) inboxes[d.op].push_triple(std::move(d.triple), std::move(d.doc));
            --busy_workers;
            drop_cv.notify_all();
        }
    };

    auto op_fn = [&](std::size_t i) {
      try {
        OpInbox& inbox = inboxes[i];
        std::unique_lock<std::mutex> lock(inbox.mu);
        while (true) {
            while (inbox.triples.empty() && inbox.probes.empty() && !inbox.closed) {
                inbox.idle.store(true, std::memory_order_release);
                inbox.cv.wait(lock);
            }
            inbox.idle.store(false, std::memory_order_release);
            if (inbox.triples.empty() && inbox.probes.empty()) return;

            if (!inbox.triples.empty()) {
                auto [t, doc] = std::move(inbox.triples.front());
                inbox.triples.pop_front();
                lock.unlock();
                if (auto is = ops[i].ingest(t, doc, shared.ts_counter)) dispatch_ch.push(std::move(*is));
            } else {
                IntermediateSolution incoming = std::move(inbox.probes.front());
                inbox.probes.pop_front();
                lock.unlock();
                for (auto& merged : ops[i].probe(incoming)) dispatch_ch.push(std::move(merged));
            }
            inbox.processed.fetch_add(1, std::memory_order_release);
            lock.lock();
        }
      } catch (...) {
        record_error(std::current_exception());
        inboxes[i].idle.store(true, std::memory_order_release);
      }
    };

    auto dispatcher_fn = [&] {
      try {
        IntermediateSolution is;
        while (dispatch_ch.pop_wait(is, dispatcher_idle)) {
            std::vector<FeedbackMessage> feedback;
            auto target = dispatcher.route(is, feedback);
            if (target) inboxes[*target].push_probe(std::move(is));
            for (auto& msg : feedback) feedback_ch.push(std::move(msg));
            dispatcher_processed_msgs.fetch_add(1, std::memory_order_release);
        }
      } catch (...) {
        record_error(std::current_exception());
        dispatcher_idle.store(true, std::memory_order_release);
      }
    };

    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < n; ++i) threads.emplace_back(op_fn, i);
    std::thread dispatcher_thread(dispatcher_fn);
    std::vector<std::thread> worker_threads;
    for (int w = 0; w < workers; ++w) worker_threads.emplace_back(worker_fn);

    for (auto& t : worker_threads) t.join();

    // retrieval is complete; wait for the operator network to quiesce
    auto network_counts = [&] {
        std::uint64_t sum = dispatcher_processed_msgs.load(std::memory_order_acquire);
        for (const OpInbox& inbox : inboxes) sum += inbox.processed.load(std::memory_order_acquire);
        return sum;
    };
    auto network_quiet = [&] {
        if (!dispatch_ch.empty() || !dispatcher_idle.load(std::memory_order_acquire)) return false;
        for (OpInbox& inbox : inboxes) {
            if (!inbox.both_empty() || !inbox.idle.load(std::memory_order_acquire)) return false;
        }
        return true;
    };
    while (true) {
        {
            std::lock_guard<std::mutex> lock(drop_mu);
            if (aborted) break;
        }
        if (network_quiet()) {
            std::uint64_t before = network_counts();
            if (network_quiet() && network_counts() == before) break;
        }
        std::this_thread::sleep_for(std::chrono::microseconds(100));
    }

    for (OpInbox& inbox : inboxes) inbox.close();
    dispatch_ch.close();
    for (auto& t : threads) t.join();
    dispatcher_thread.join();

    // leftover feedback from late solutions still counts toward the RCCs
    {
        std::lock_guard<std::mutex> lock(drop_mu);
        FeedbackMessage msg;
        while (feedback_ch.try_pop(msg)) drop.apply_feedback(msg);
    }
    shared.record(TraceEvent{TraceEvent::Kind::ExecEnd, 0, {}, {}, true});
    {
        std::lock_guard<std::mutex> lock(drop_mu);
        if (first_error) std::rethrow_exception(first_error);
    }

    ExecutionResult result;
    result.solutions = std::move(shared.solutions);
    result.trace = std::move(shared.trace);
    result.lookup_order = drop.lookup_order();
    result.retrieved = drop.retrieved();
    result.rcc = drop.final_rcc();
    result.linkgraph_dot = drop.graph().to_dot();
    result.audits = drop.take_audits();
    result.pops_before_first_feedback = drop.first_feedback_pops();
    result.dispatcher_processed = dispatcher.processed();
    result.reprioritizations = drop.reprioritizations();
    result.unknown_rcc_bumps = drop.graph().unknown_bumps();
    return result;
}

}  // namespace

ExecutionResult execute(const BGPQuery& query, WebAccess& web, const EngineConfig& cfg) {
    if (query.patterns.empty()) throw std::invalid_argument("query has no patterns");
    EngineShared shared{query, web, cfg};
    if (cfg.deterministic || cfg.lookup_threads <= 0) {
        return run_deterministic(shared);
    }
    return run_concurrent(shared);
}

}  // namespace linktrail
