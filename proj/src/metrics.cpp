#include "linktrail/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace linktrail {

ResponseTimes response_times(const ExecutionTrace& trace, std::size_t result_cardinality) {
    if (trace.events.size() < 2 || trace.events.front().kind != TraceEvent::Kind::ExecStart ||
        trace.events.back().kind != TraceEvent::Kind::ExecEnd) {
        throw std::invalid_argument("malformed trace");
    }
    ResponseTimes rt;
    rt.t_start = trace.t_start();
    rt.t_end = trace.t_end();
    if (rt.t_end == rt.t_start) throw std::invalid_argument("zero-duration trace");

    std::vector<std::uint64_t> times = trace.solution_times();
    if (times.empty() || result_cardinality == 0) return rt;
    if (times.size() < result_cardinality) throw std::invalid_argument("trace has fewer solutions than cardinality");

    const double span = static_cast<double>(rt.t_end - rt.t_start);
    const std::size_t half_index = (result_cardinality + 1) / 2;  // ceil(n/2), 1-based

    rt.t_1st = times.front();
    rt.t_50 = times[half_index - 1];
    rt.t_last = times[result_cardinality - 1];
    rt.rel_rt_1st = static_cast<double>(rt.t_1st - rt.t_start) / span;
    rt.rel_rt_50 = static_cast<double>(rt.t_50 - rt.t_start) / span;
    rt.rel_rt_cmpl = static_cast<double>(rt.t_last - rt.t_start) / span;
    return rt;
}

double geometric_mean(const std::vector<double>& values) {
    if (values.empty()) return 0;
    double log_sum = 0;
    for (double v : values) log_sum += std::log(v);
    return std::exp(log_sum / static_cast<double>(values.size()));
}

double sample_stdev(const std::vector<double>& values) {
    if (values.size() < 2) return 0;
    bool all_equal = true;
    for (double v : values) all_equal = all_equal && v == values.front();
    if (all_equal) return 0;
    double mean = 0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double sq = 0;
    for (double v : values) sq += (v - mean) * (v - mean);
    return std::sqrt(sq / static_cast<double>(values.size() - 1));
}

}  // namespace linktrail
