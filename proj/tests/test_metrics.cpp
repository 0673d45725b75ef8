#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linktrail/metrics.hpp"

#include "support.hpp"

using namespace linktrail;
using namespace linktrail::testing;

namespace {

ExecutionTrace synthetic_trace(std::uint64_t t_end, const std::vector<std::uint64_t>& solution_times) {
    ExecutionTrace trace;
    trace.events.push_back({TraceEvent::Kind::ExecStart, 0, {}, {}, true});
    std::uint64_t n = 0;
    for (std::uint64_t t : solution_times) {
        trace.events.push_back({TraceEvent::Kind::SolutionEmitted, t, {}, ++n, true});
    }
    trace.events.push_back({TraceEvent::Kind::RetrievalComplete, t_end, {}, {}, true});
    trace.events.push_back({TraceEvent::Kind::ExecEnd, t_end, {}, {}, true});
    return trace;
}

}  // namespace

TEST_CASE("relative response times") {
    ResponseTimes rt = response_times(synthetic_trace(10, {5}), 1);
    CHECK(*rt.rel_rt_1st == doctest::Approx(0.5));
    CHECK(*rt.rel_rt_50 == doctest::Approx(0.5));
    CHECK(*rt.rel_rt_cmpl == doctest::Approx(0.5));

    // four solutions: the 50% point is the ceil(4/2) = 2nd one
    ResponseTimes quad = response_times(synthetic_trace(10, {1, 2, 3, 4}), 4);
    CHECK(*quad.rel_rt_1st == doctest::Approx(0.1));
    CHECK(*quad.rel_rt_50 == doctest::Approx(0.2));
    CHECK(*quad.rel_rt_cmpl == doctest::Approx(0.4));

    // five solutions: ceil(5/2) = 3rd
    ResponseTimes five = response_times(synthetic_trace(10, {1, 2, 3, 4, 5}), 5);
    CHECK(*five.rel_rt_50 == doctest::Approx(0.3));

    ResponseTimes empty = response_times(synthetic_trace(10, {}), 0);
    CHECK(!empty.rel_rt_1st);
    CHECK(!empty.rel_rt_50);
    CHECK(!empty.rel_rt_cmpl);

    CHECK_THROWS_AS(response_times(synthetic_trace(0, {}), 0), std::invalid_argument);
}

TEST_CASE("relRT ordering holds on real engine traces") {
    SplitMix64 rng(113);
    for (int round = 0; round < 10; ++round) {
        Instance inst = random_instance(rng, round);
        VirtualClock clock;
        InProcessAccess access(inst.web, clock);
        EngineConfig cfg;
        cfg.strategy = StrategyKind::Baseline;
        cfg.routing.kind = RoutingPolicyKind::LrMi;
        cfg.deterministic = true;
        cfg.seed = rng.next();
        ExecutionResult res = execute(inst.query, access, cfg);
        ResponseTimes rt = response_times(res.trace, res.solutions.size());
        if (!rt.rel_rt_1st) continue;
        CHECK(*rt.rel_rt_1st <= *rt.rel_rt_50);
        CHECK(*rt.rel_rt_50 <= *rt.rel_rt_cmpl);
        CHECK(*rt.rel_rt_cmpl <= 1.0);
        CHECK(*rt.rel_rt_1st >= 0.0);
    }
}

TEST_CASE("geometric mean and sample stdev") {
    CHECK(geometric_mean({0.25, 0.25}) == doctest::Approx(0.25));
    CHECK(geometric_mean({0.5}) == doctest::Approx(0.5));
    CHECK(geometric_mean({2.0, 8.0}) == doctest::Approx(4.0));

    SplitMix64 rng(127);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> values;
        const int n = 1 + static_cast<int>(rng.next() % 6);
        double lo = 1e9, hi = 0;
        for (int k = 0; k < n; ++k) {
            double v = 0.01 + rng.next_unit();
            values.push_back(v);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        double g = geometric_mean(values);
        CHECK(g >= lo - 1e-12);
        CHECK(g <= hi + 1e-12);
    }

    CHECK(sample_stdev({1.0}) == 0.0);
    CHECK(sample_stdev({1.0, 1.0, 1.0}) == 0.0);
    CHECK(sample_stdev({1.0, 3.0}) == doctest::Approx(std::sqrt(2.0)));
}
