#pragma once

#include <optional>
#include <vector>

#include "linktrail/engine.hpp"

namespace linktrail {

/// Relative response times of one execution, all in [0,1]:
///   relRT1st  = (t_1st - t_start) / (t_end - t_start)
///   relRT50   = same for the ceil(cardinality/2)-th solution
///   relRTCmpl = same for the last solution
/// Absent when the execution produced no solutions.
struct ResponseTimes {
    std::optional<double> rel_rt_1st;
    std::optional<double> rel_rt_50;
    std::optional<double> rel_rt_cmpl;
    std::uint64_t t_start = 0;
    std::uint64_t t_1st = 0;
    std::uint64_t t_50 = 0;
    std::uint64_t t_last = 0;
    std::uint64_t t_end = 0;
};

/// Throws std::invalid_argument on a zero-duration trace (degenerate) or
/// when the trace is malformed.
ResponseTimes response_times(const ExecutionTrace& trace, std::size_t result_cardinality);

double geometric_mean(const std::vector<double>& values);
double sample_stdev(const std::vector<double>& values);

}  // namespace linktrail
