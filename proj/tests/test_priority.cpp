#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "linktrail/priority.hpp"

#include "support.hpp"

using namespace linktrail;
using namespace linktrail::testing;

namespace {

struct Fixture {
    LinkGraph graph;
    LookupQueue queue;
    SplitMix64 rng{1};
    StrategyEnv env;

    Fixture() {
        env.graph = &graph;
        env.queue = &queue;
        env.rng = &rng;
    }
};

FeedbackMessage is_msg(std::initializer_list<std::pair<std::string, Term>> bindings, int covered) {
    FeedbackMessage msg;
    msg.kind = FeedbackMessage::Kind::IntermediateSolution;
    for (auto& [var, term] : bindings) msg.mapping.bindings.emplace(var, term);
    msg.covered_count = covered;
    return msg;
}

}  // namespace

TEST_CASE("queue is max-priority with FIFO ties") {
    LookupQueue q;
    q.push(ent(0), 1);
    q.push(ent(1), 1);
    CHECK(q.pop().uri == ent(0));  // arrival order among equals
    CHECK(q.pop().uri == ent(1));

    q.push(ent(0), 1);
    q.push(ent(1), 5);
    CHECK(q.pop().uri == ent(1));

    q.push(ent(2), 5);
    q.update(ent(0), 9);
    CHECK(q.pop().uri == ent(0));
    CHECK(q.pop().uri == ent(2));
    CHECK(q.empty());
    CHECK_THROWS(q.pop());
}

TEST_CASE("update preserves the arrival sequence number") {
    LookupQueue q;
    q.push(ent(0), 0);
    q.push(ent(1), 0);
    q.update(ent(0), 0.0);  // no-op
    q.update(ent(0), 3);
    q.update(ent(0), 0);  // back to the old value; arrival order must survive
    CHECK(q.pop().uri == ent(0));
    CHECK(q.pop().uri == ent(1));
}

TEST_CASE("non-adaptive initial priorities") {
    Fixture f;
    DiscoveryContext seed_ctx;
    seed_ctx.is_seed = true;
    DiscoveryContext child_ctx;
    child_ctx.parent_uri = ent(9);
    child_ctx.parent_priority = 3;

    auto baseline = make_strategy(StrategyKind::Baseline);
    CHECK(baseline->initial_priority(ent(0), seed_ctx, f.env) == 0);
    CHECK(baseline->initial_priority(ent(0), child_ctx, f.env) == 0);
    CHECK(baseline->on_lookup_complete(ent(0), f.env).empty());

    auto dfs = make_strategy(StrategyKind::Dfs);
    CHECK(dfs->initial_priority(ent(0), seed_ctx, f.env) == 0);
    CHECK(dfs->initial_priority(ent(0), child_ctx, f.env) == 4);

    auto bfs = make_strategy(StrategyKind::Bfs);
    CHECK(bfs->initial_priority(ent(0), seed_ctx, f.env) == 0);
    DiscoveryContext level1;
    level1.parent_priority = 0;
    level1.parent_uri = ent(8);
    DiscoveryContext level2;
    level2.parent_priority = -1;
    level2.parent_uri = ent(7);
    CHECK(bfs->initial_priority(ent(0), level1, f.env) == -1);
    CHECK(bfs->initial_priority(ent(1), level2, f.env) == -2);

    auto oracle = make_strategy(StrategyKind::Oracle, {{ent(0).lexical, 7}});
    CHECK(oracle->initial_priority(ent(0), seed_ctx, f.env) == 7);
    CHECK(oracle->initial_priority(ent(1), seed_ctx, f.env) == 0);  // unknown document

    auto random = make_strategy(StrategyKind::Random);
    for (int i = 0; i < 100; ++i) {
        Priority p = random->initial_priority(ent(0), seed_ctx, f.env);
        CHECK(p >= 1);
        CHECK(p <= 10);
        CHECK(p == static_cast<std::int64_t>(p));
    }
}

TEST_CASE("indegree reprioritizes queued URIs to their in-edge count") {
    Fixture f;
    auto strategy = make_strategy(StrategyKind::Indegree);

    f.graph.add_queued(ent(0));
    f.graph.promote(ent(0));
    f.graph.add_queued(ent(1));
    f.graph.promote(ent(1));

    DiscoveryContext ctx;
    ctx.parent_uri = ent(0);
    f.graph.add_discovery(ent(0), ent(2), false);
    f.queue.push(ent(2), strategy->initial_priority(ent(2), ctx, f.env));
    CHECK(*f.queue.priority_of(ent(2)) == 0);

    auto updates = strategy->on_lookup_complete(ent(0), f.env);
    REQUIRE(updates.size() == 1);
    CHECK(updates[0].priority == 1);
    f.queue.update(updates[0].uri, updates[0].priority);

    // second in-edge from another document
    f.graph.add_discovery(ent(1), ent(2), false);
    updates = strategy->on_lookup_complete(ent(1), f.env);
    REQUIRE(updates.size() == 1);
    CHECK(updates[0].uri == ent(2));
    CHECK(updates[0].priority == 2);
}

TEST_CASE("solution-aware strategies are quiet before any solution") {
    Fixture f;
    for (StrategyKind kind : {StrategyKind::Rcc1, StrategyKind::Rcc2, StrategyKind::Rel1, StrategyKind::Rel2}) {
        auto strategy = make_strategy(kind);
        f.graph.add_queued(ent(0));
        f.graph.promote(ent(0));
        f.graph.add_discovery(ent(0), ent(1), false);
        f.queue.push(ent(1), 0);
        CHECK(strategy->on_lookup_complete(ent(0), f.env).empty());
        CHECK(strategy->on_feedback(is_msg({{"x", ent(1)}}, 1), f.env).empty());
    }
}

TEST_CASE("rcc strategies rescore queued URIs after provenance feedback") {
    Fixture f;
    auto strategy = make_strategy(StrategyKind::Rcc1);

    f.graph.add_queued(ent(0));
    f.graph.promote(ent(0));
    f.graph.add_discovery(ent(0), ent(1), false);
    f.queue.push(ent(1), 0);

    FeedbackMessage prov;
    prov.kind = FeedbackMessage::Kind::SolutionProvenance;
    prov.provenance = {ent(0).lexical};
    f.graph.bump_rcc(prov.provenance);  // the data-retrieval operator does this first

    auto updates = strategy->on_feedback(prov, f.env);
    REQUIRE(updates.size() == 1);
    CHECK(updates[0].uri == ent(1));
    CHECK(updates[0].priority == 1);
}

TEST_CASE("IS raises queued URIs to the covered count, never lowers") {
    Fixture f;
    auto strategy = make_strategy(StrategyKind::Is);
    f.queue.push(ent(0), 0);

    auto updates = strategy->on_feedback(is_msg({{"x", ent(0)}}, 2), f.env);
    REQUIRE(updates.size() == 1);
    CHECK(updates[0].priority == 2);
    f.queue.update(ent(0), 2);

    // same message again: priority is no longer smaller, nothing changes
    CHECK(strategy->on_feedback(is_msg({{"x", ent(0)}}, 2), f.env).empty());
    // lower covered count never lowers the priority
    CHECK(strategy->on_feedback(is_msg({{"x", ent(0)}}, 1), f.env).empty());
    // literals bound in the mapping are ignored
    CHECK(strategy->on_feedback(is_msg({{"y", lit(0)}}, 3), f.env).empty());
    // URIs that are not queued are ignored
    CHECK(strategy->on_feedback(is_msg({{"x", ent(5)}}, 3), f.env).empty());
}

TEST_CASE("ISdcr starts bfs-like and raises like IS") {
    Fixture f;
    auto strategy = make_strategy(StrategyKind::Isdcr);
    DiscoveryContext seed_ctx;
    seed_ctx.is_seed = true;
    DiscoveryContext child;
    child.parent_uri = ent(9);
    child.parent_priority = -2;
    CHECK(strategy->initial_priority(ent(0), seed_ctx, f.env) == 0);
    CHECK(strategy->initial_priority(ent(1), child, f.env) == -3);

    f.queue.push(ent(1), -3);
    auto updates = strategy->on_feedback(is_msg({{"x", ent(1)}}, 1), f.env);
    REQUIRE(updates.size() == 1);
    CHECK(updates[0].priority == 1);
}

TEST_CASE("hybrid priority is IS-score times graph score") {
    Fixture f;
    auto strategy = make_strategy(StrategyKind::Isrel1);

    // graph: doc0 -> u2, doc1 -> u2, doc2 -> u2; three relevant in-neighbors
    for (int i = 0; i < 3; ++i) {
        f.graph.add_queued(ent(i));
        f.graph.promote(ent(i));
    }
    DiscoveryContext ctx;
    ctx.parent_uri = ent(0);
    f.graph.add_discovery(ent(0), ent(3), false);
    f.graph.add_discovery(ent(1), ent(3), false);
    f.graph.add_discovery(ent(2), ent(3), false);
    f.queue.push(ent(3), strategy->initial_priority(ent(3), ctx, f.env));
    CHECK(*f.queue.priority_of(ent(3)) == 0);

    for (int i = 0; i < 3; ++i) f.graph.bump_rcc({ent(i).lexical});  // relScore1(u2) = 3

    // IS-score 2 via an intermediate solution with two covered bits
    auto updates = strategy->on_feedback(is_msg({{"x", ent(3)}}, 2), f.env);
    REQUIRE(!updates.empty());
    CHECK(updates.back().uri == ent(3));
    CHECK(updates.back().priority == 6);

    // graph growth reprioritizes too: a fourth relevant in-neighbor
    f.queue.update(ent(3), 6);
    f.graph.add_queued(ent(4));
    f.graph.promote(ent(4));
    f.graph.add_discovery(ent(4), ent(3), false);
    f.graph.bump_rcc({ent(4).lexical});
    updates = strategy->on_lookup_complete(ent(4), f.env);
    REQUIRE(updates.size() == 1);
    CHECK(updates[0].priority == 8);

    // hybrid product with either factor 0 stays 0
    auto isrcc = make_strategy(StrategyKind::Isrcc1);
    Fixture g;
    g.graph.add_queued(ent(0));
    g.graph.promote(ent(0));
    g.graph.add_discovery(ent(0), ent(1), false);
    g.queue.push(ent(1), isrcc->initial_priority(ent(1), ctx, g.env));
    CHECK(isrcc->on_feedback(is_msg({{"x", ent(1)}}, 2), g.env).empty());  // rcc score still 0
}

TEST_CASE("IS priorities are the running max of covered counts, never decreasing") {
    SplitMix64 rng(61);
    for (int round = 0; round < 50; ++round) {
        Fixture f;
        auto strategy = make_strategy(StrategyKind::Is);
        const int n_uris = 1 + static_cast<int>(rng.next() % 6);
        std::vector<Priority> expected(static_cast<std::size_t>(n_uris), 0);
        for (int u = 0; u < n_uris; ++u) f.queue.push(ent(u), 0);

        const int n_msgs = static_cast<int>(rng.next() % 40);
        for (int m = 0; m < n_msgs; ++m) {
            const int u = static_cast<int>(rng.next() % n_uris);
            const int cnt = 1 + static_cast<int>(rng.next() % 4);
            auto updates = strategy->on_feedback(is_msg({{"x", ent(u)}}, cnt), f.env);
            for (const auto& r : updates) {
                const Priority before = *f.queue.priority_of(r.uri);
                CHECK(r.priority > before);  // only raises
                f.queue.update(r.uri, r.priority);
            }
            expected[static_cast<std::size_t>(u)] =
                std::max(expected[static_cast<std::size_t>(u)], static_cast<Priority>(cnt));
            for (int v = 0; v < n_uris; ++v) {
                CHECK(*f.queue.priority_of(ent(v)) == expected[static_cast<std::size_t>(v)]);
            }
        }
    }
}
