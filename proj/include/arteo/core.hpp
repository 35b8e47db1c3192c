#pragma once

#include <functional>
#include <optional>

#include "arteo/confidence.hpp"
#include "arteo/scenario.hpp"
#include "arteo/solver.hpp"
#include "arteo/trace.hpp"

namespace arteo {

struct RunState;

/// Adaptive exploration weighting: z_t = zeta when the rule holds, else 0.
/// An empty rule falls back to the scenario's own gate.
struct ExplorationPolicy {
  double zeta = 0.0;
  std::function<bool(const RunState&, double goal)> rule;
};

/// Everything one run mutates step to step.
struct RunState {
  int t = 0;
  std::vector<GaussianProcess> models;  // conditioned on safe_set as of step t-1
  ConfidenceParams confidence;
  std::optional<double> beta_override;  // fixed width multiplier when set
  ExplorationPolicy policy;
  SolverSettings solver;
  Eigen::VectorXd last_decision;
  SafeSet safe_set;
  RunTrace trace;
  Rng noise{0};
  uint64_t solver_seed_root = 0;
  bool has_prev = false;
  double prev_goal = 0.0;
  double prev_observed_total = 0.0;
};

/// Shared run settings for the adaptive tracker and the baseline.
struct RunOptions {
  int horizon = 0;  // 0 -> the scenario reference's own horizon
  double zeta = 25.0;
  ConfidenceParams confidence;
  std::optional<double> beta_override;
  SolverSettings solver;
  uint64_t seed = 0;
};

/// Sum over unknowns of the posterior std at each model's own input; >= 0.
double uncertainty_term(const std::vector<GaussianProcess>& models,
                        const std::vector<Eigen::VectorXd>& inputs);
/// Convenience for the componentwise case: model i queried at (x[i]).
double uncertainty_term(const std::vector<GaussianProcess>& models, const Eigen::VectorXd& x);

/// Exploration-weighted objective C - z * U.
double arteo_cost(double cost_value, double uncertainty, double z);

/// Fresh state for a run: bootstrap observations drawn (stream "safe_seed"),
/// prior models, warm start at the first bootstrap input.
RunState init_run_state(const TrackingScenario& scenario, const RunOptions& opts);

/// One step: set z, re-condition the models, assemble the weighted problem with
/// propagated safety bounds at beta_t, solve warm-started at the previous
/// decision, observe, grow the safe sets. An infeasible solve holds the
/// previous decision and flags the row as a safety hold. Appends a trace row
/// and returns the decision taken.
Eigen::VectorXd arteo_step(RunState& state, double goal, const TrackingScenario& scenario);

/// Full run over the goal stream. A scenario evaluation failure aborts with
/// the trace collected so far flagged partial.
RunTrace run_arteo(const TrackingScenario& scenario, const RunOptions& opts);

}  // namespace arteo
