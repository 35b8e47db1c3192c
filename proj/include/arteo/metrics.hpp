#pragma once

#include <vector>

#include "arteo/trace.hpp"

namespace arteo {

/// Prefix sums of per-step regret; nondecreasing. Throws on an empty trace.
std::vector<double> cumulative_regret(const RunTrace& trace);

/// Per-step sum of the posterior stds actually used at each decision.
std::vector<double> total_uncertainty(const RunTrace& trace);

/// Steps whose true produced quantity exceeds the limit by more than 1e-9.
int violation_count(const RunTrace& trace, double limit);

}  // namespace arteo
