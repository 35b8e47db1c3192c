#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "arteo/bids.hpp"
#include "arteo/trace.hpp"

namespace arteo {

/// Version stamp written as the first line (a comment) of trace.csv.
inline constexpr const char* kTraceSchemaVersion = "arteo.trace.v1";

/// Shortest round-trippable decimal form (printf %.17g).
std::string format_double(double v);

/// Column list for traces over d unknowns: algorithm,seed,t,goal,x0..x{d-1},
/// z,beta,gamma,mu_0,sigma_0,y_0,true_0,...,produced_pred,produced_true,
/// constraint_margin,solver_status,solver_iterations,safety_hold,regret.
std::string trace_csv_header(int decision_dim);

/// Writes the version comment, the header, then one row per step per trace,
/// in the given trace order. All traces must share one decision dimension.
void write_trace_csv(std::ostream& out, const std::vector<RunTrace>& traces);

/// Per-run rollup: algorithm,seed,steps,terminal_cumulative_regret,
/// violation_count,final_total_uncertainty,safety_holds,partial.
std::string metrics_csv_header();
void write_metrics_csv(std::ostream& out, const std::vector<RunTrace>& traces,
                       double safety_limit);

/// campaign_id,spend,budget,realized_roi,threshold,n_positive_bids,z.
std::string campaigns_csv_header();
void write_campaigns_csv(std::ostream& out, const std::vector<CampaignOutcome>& outcomes);

}  // namespace arteo
