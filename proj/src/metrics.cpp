#include "arteo/metrics.hpp"

#include <stdexcept>

namespace arteo {

std::vector<double> cumulative_regret(const RunTrace& trace) {
  if (trace.rows.empty()) throw std::invalid_argument("trace is empty");
  std::vector<double> out;
  out.reserve(trace.rows.size());
  double acc = 0.0;
  for (const TraceRow& row : trace.rows) {
    acc += row.regret;
    out.push_back(acc);
  }
  return out;
}

std::vector<double> total_uncertainty(const RunTrace& trace) {
  if (trace.rows.empty()) throw std::invalid_argument("trace is empty");
  std::vector<double> out;
  out.reserve(trace.rows.size());
  for (const TraceRow& row : trace.rows) {
    double total = 0.0;
    for (double s : row.sigma) total += s;
    out.push_back(total);
  }
  return out;
}

int violation_count(const RunTrace& trace, double limit) {
  int count = 0;
  for (const TraceRow& row : trace.rows)
    if (row.produced_true > limit + 1e-9) ++count;
  return count;
}

}  // namespace arteo
