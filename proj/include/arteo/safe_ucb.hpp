#pragma once

#include <optional>

#include "arteo/core.hpp"

namespace arteo {

/// Baseline tracker that never uses the known goal-gap structure: it learns a
/// discrepancy surrogate f (gap between goal and produced total) and a safety
/// surrogate g (limit minus produced total) directly over the decision space,
/// then minimizes the optimistic f lower bound subject to the pessimistic g
/// lower bound staying nonnegative.
struct SafeUcbState {
  GaussianProcess model_f;
  GaussianProcess model_g;
  std::vector<Observation> history_f;  // identical input points as history_g
  std::vector<Observation> history_g;
  ConfidenceParams confidence;
  std::optional<double> beta_override;
  SolverSettings solver;
  Eigen::VectorXd last_decision;
  RunTrace trace;
  Rng noise{0};
  uint64_t solver_seed_root = 0;
  int t = 0;

  SafeUcbState(KernelSpec kernel, double gp_noise_variance)
      : model_f(kernel, gp_noise_variance), model_g(kernel, gp_noise_variance) {}
};

/// Fresh baseline state: the same bootstrap inputs the adaptive tracker would
/// draw, replicated across components into decision points; the discrepancy
/// values use the goal at step 0.
SafeUcbState init_safe_ucb_state(const TrackingScenario& scenario, const RunOptions& opts);

/// One step: re-condition both surrogates, solve
///   minimize mu_f - beta sigma_f  s.t.  mu_g - beta sigma_g >= 0
/// warm-started at the previous decision, measure, append to both histories.
/// Infeasible solves hold the previous decision, as in the adaptive tracker.
Eigen::VectorXd safe_ucb_step(SafeUcbState& state, double goal,
                              const TrackingScenario& scenario);

RunTrace run_safe_ucb(const TrackingScenario& scenario, const RunOptions& opts);

}  // namespace arteo
