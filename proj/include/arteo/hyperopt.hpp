#pragma once

#include <functional>
#include <vector>

#include "arteo/core.hpp"
#include "arteo/metrics.hpp"

namespace arteo {

struct GridZRow {
  double z = 0.0;
  double mean_terminal_regret = 0.0;
  std::vector<double> per_seed_regret;
};

struct GridZResult {
  double best_z = 0.0;
  std::vector<GridZRow> table;  // one row per candidate, in candidate order
  std::vector<uint64_t> seeds;  // identical across rows
};

/// Terminal cumulative regret averaged over a fixed seed set, per candidate
/// exploration weight; exact ties go to the smaller candidate.
GridZResult grid_search_z(const std::vector<double>& candidates,
                          const TrackingScenario& scenario, const RunOptions& base,
                          int n_seeds = 5);

struct BayesOptPoint {
  double x = 0.0;
  double value = 0.0;
};

struct BayesOptResult {
  std::vector<BayesOptPoint> evaluated;   // in evaluation order
  std::vector<double> incumbent_values;   // best value after each evaluation
  double best_x = 0.0;
  double best_value = 0.0;
  std::vector<double> grid;            // final surrogate report locations
  std::vector<double> surrogate_mean;  // and its mean / 95%-style band
  std::vector<double> surrogate_lower;
  std::vector<double> surrogate_upper;
};

/// 1-D surrogate search: three-point initialization, a squared-exponential
/// surrogate over standardized values, and a lower-confidence-bound
/// acquisition (kappa = 2) minimized over a 512-point grid. Evaluations are
/// capped at 35. Deterministic.
BayesOptResult bayesopt_minimize(const std::function<double(double)>& objective, double lo,
                                 double hi, int budget, uint64_t seed = 0);

/// bayesopt_minimize over the exploration weight, objective = mean terminal
/// cumulative regret on the same fixed seed set grid_search_z uses.
BayesOptResult bayesopt_z(double lo, double hi, int budget,
                          const TrackingScenario& scenario, const RunOptions& base,
                          int n_seeds = 5);

struct ComplexityRow {
  int horizon = 0;
  double mean_step_seconds = 0.0;  // averaged over the run's second half
};

struct ComplexityResult {
  std::vector<ComplexityRow> rows;
  double slope = 0.0;  // log-log fit of step time against horizon
  bool slope_defined = false;
};

/// Times full runs at each horizon (the reference is tiled as needed) and fits
/// the growth exponent; a single horizon leaves the slope undefined.
ComplexityResult complexity_probe(const TrackingScenario& scenario,
                                  const std::vector<int>& horizons, const RunOptions& base);

}  // namespace arteo
