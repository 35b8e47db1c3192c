#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arteo/gp.hpp"
#include "arteo/solver.hpp"

namespace arteo {

/// Per-unknown ordered observation histories (inputs in each model's own space).
using SafeSet = std::vector<std::vector<Observation>>;

struct TraceRow {
  int t = 0;
  double goal = 0.0;
  Eigen::VectorXd decision;
  std::vector<double> mu;           // predicted mean per unknown at the decision
  std::vector<double> sigma;        // predicted std per unknown at the decision
  std::vector<double> y;            // noisy observations collected this step
  std::vector<double> true_values;  // noiseless environment values per unknown
  double produced_pred = 0.0;
  double produced_true = 0.0;
  double z = 0.0;
  double beta = 0.0;
  double gamma = 0.0;  // information-gain budget behind this step's beta
  double constraint_margin = 0.0;
  SolveStatus solver_status = SolveStatus::Converged;
  int solver_iterations = 0;
  bool safety_hold = false;
  double regret = 0.0;
  double step_seconds = 0.0;  // wall time; never serialized (not deterministic)
};

struct RunTrace {
  std::string algorithm;
  uint64_t seed = 0;
  std::vector<TraceRow> rows;
  SafeSet safe_seed;  // snapshot of the bootstrap observations
  bool partial = false;
  std::string abort_reason;
};

}  // namespace arteo
