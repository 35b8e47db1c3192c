#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace arteo {

/// Value returned by check_feasibility when a problem has no constraints.
inline constexpr double kVacuousFeasibility = -1e300;

/// Box-bounded nonlinear program
///   minimize f(x)  subject to  g_a(x) <= 0 for all a,  lo <= x <= hi.
/// `known_terms` is an optional side-channel of precomputed values the
/// objective/constraint closures may share; the solver never calls it.
struct DecisionProblem {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::function<double(const Eigen::VectorXd&)> objective;
  std::vector<std::function<double(const Eigen::VectorXd&)>> constraints;
  std::function<std::vector<double>(const Eigen::VectorXd&)> known_terms;

  int dim() const { return static_cast<int>(lower.size()); }
  void validate() const;  // throws std::invalid_argument on bad bounds / missing objective
};

enum class SolveStatus { Converged, MaxIterations, Infeasible };

const char* to_string(SolveStatus status);

struct SolveResult {
  Eigen::VectorXd point;
  double value = 0.0;
  double max_violation = 0.0;  // max_a g_a(point); kVacuousFeasibility when unconstrained
  SolveStatus status = SolveStatus::Converged;
  int iterations = 0;  // inner iterations spent on the selected start
  std::string diagnostic;
};

struct SolverSettings {
  int max_iterations = 500;  // inner-iteration budget per start
  double tol_feasibility = 1e-6;
  double tol_stationarity = 1e-6;
  int multistarts = 8;  // total starts including the caller's initial point
  uint64_t seed = 0;    // rotates the quasi-random start layout
  int outer_rounds = 12;
  double rho_initial = 10.0;
  double rho_max = 1e10;

  bool operator==(const SolverSettings&) const = default;
};

/// Augmented-Lagrangian solve with projected-gradient inner steps, central
/// finite-difference gradients (step 1e-6 * (1 + |x_i|)) and deterministic
/// quasi-random multi-starts; the caller's initial point is always one start.
/// Best feasible result wins; exact value ties break to the lexicographically
/// smallest point. Identical problem + settings => bitwise-identical result.
SolveResult minimize(const DecisionProblem& problem, const Eigen::VectorXd& initial,
                     const SolverSettings& settings = {});

/// Exhaustive reference for low dimension (dim <= 3): evaluates every grid
/// point at the given resolution and returns the best feasible one.
SolveResult grid_oracle(const DecisionProblem& problem, double resolution);

/// max_a g_a(x), or kVacuousFeasibility when there are no constraints.
double check_feasibility(const DecisionProblem& problem, const Eigen::VectorXd& x);

}  // namespace arteo
