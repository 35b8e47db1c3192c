#include "arteo/csv.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "arteo/metrics.hpp"

namespace arteo {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trace_csv_header(int decision_dim) {
  if (decision_dim < 1) throw std::invalid_argument("decision dimension must be >= 1");
  std::string h = "algorithm,seed,t,goal";
  for (int i = 0; i < decision_dim; ++i) h += ",x" + std::to_string(i);
  h += ",z,beta,gamma";
  for (int i = 0; i < decision_dim; ++i) {
    const std::string s = std::to_string(i);
    h += ",mu_" + s + ",sigma_" + s + ",y_" + s + ",true_" + s;
  }
  h += ",produced_pred,produced_true,constraint_margin,solver_status,solver_iterations,"
       "safety_hold,regret";
  return h;
}

void write_trace_csv(std::ostream& out, const std::vector<RunTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("no traces to serialize");
  int d = -1;
  for (const RunTrace& trace : traces)
    for (const TraceRow& row : trace.rows) {
      if (d < 0) d = static_cast<int>(row.decision.size());
      if (d != static_cast<int>(row.decision.size()))
        throw std::invalid_argument("traces mix decision dimensions");
    }
  if (d < 0) throw std::invalid_argument("traces contain no rows");
  out << "# " << kTraceSchemaVersion << '\n' << trace_csv_header(d) << '\n';
  for (const RunTrace& trace : traces) {
    for (const TraceRow& row : trace.rows) {
      out << trace.algorithm << ',' << trace.seed << ',' << row.t << ','
          << format_double(row.goal);
      for (int i = 0; i < d; ++i) out << ',' << format_double(row.decision[i]);
      out << ',' << format_double(row.z) << ',' << format_double(row.beta) << ','
          << format_double(row.gamma);
      for (int i = 0; i < d; ++i) {
        const auto s = static_cast<size_t>(i);
        out << ',' << format_double(row.mu[s]) << ',' << format_double(row.sigma[s]) << ','
            << format_double(row.y[s]) << ',' << format_double(row.true_values[s]);
      }
      out << ',' << format_double(row.produced_pred) << ',' << format_double(row.produced_true)
          << ',' << format_double(row.constraint_margin) << ',' << to_string(row.solver_status)
          << ',' << row.solver_iterations << ',' << (row.safety_hold ? 1 : 0) << ','
          << format_double(row.regret) << '\n';
    }
  }
}

std::string metrics_csv_header() {
  return "algorithm,seed,steps,terminal_cumulative_regret,violation_count,"
         "final_total_uncertainty,safety_holds,partial";
}

void write_metrics_csv(std::ostream& out, const std::vector<RunTrace>& traces,
                       double safety_limit) {
  out << metrics_csv_header() << '\n';
  for (const RunTrace& trace : traces) {
    int holds = 0;
    for (const TraceRow& row : trace.rows) holds += row.safety_hold ? 1 : 0;
    const auto regret = cumulative_regret(trace);
    const auto uncertainty = total_uncertainty(trace);
    out << trace.algorithm << ',' << trace.seed << ',' << trace.rows.size() << ','
        << format_double(regret.back()) << ',' << violation_count(trace, safety_limit) << ','
        << format_double(uncertainty.back()) << ',' << holds << ',' << (trace.partial ? 1 : 0)
        << '\n';
  }
}

std::string campaigns_csv_header() {
  return "campaign_id,spend,budget,realized_roi,threshold,n_positive_bids,z";
}

void write_campaigns_csv(std::ostream& out, const std::vector<CampaignOutcome>& outcomes) {
  out << campaigns_csv_header() << '\n';
  for (const CampaignOutcome& o : outcomes) {
    out << o.campaign_id << ',' << format_double(o.spend) << ',' << format_double(o.budget)
        << ',' << format_double(o.realized_roi) << ',' << format_double(o.threshold) << ','
        << o.n_positive_bids << ',' << format_double(o.z) << '\n';
  }
}

}  // namespace arteo
