#pragma once

#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "arteo/gp.hpp"
#include "arteo/rng.hpp"
#include "arteo/trace.hpp"

namespace arteo {

/// Piecewise-constant goal stream, given as (duration in steps, level) segments.
class ReferenceSignal {
 public:
  ReferenceSignal() = default;
  explicit ReferenceSignal(std::vector<std::pair<int, double>> segments);

  int horizon() const { return horizon_; }
  /// Level of the segment containing step t; throws std::out_of_range beyond the horizon.
  double at(int t) const;
  const std::vector<std::pair<int, double>>& segments() const { return segments_; }

  /// Repeat the profile until it covers at least `steps` steps.
  ReferenceSignal tiled(int steps) const;

  bool operator==(const ReferenceSignal&) const = default;

 private:
  std::vector<std::pair<int, double>> segments_;
  int horizon_ = 0;
};

/// Reads "duration,level" rows (an optional "duration,level" header allowed);
/// malformed rows are rejected naming their line.
ReferenceSignal load_reference_csv(std::istream& in);

/// Environment family where d unknown characteristics p_λ of one scalar input
/// each add up to a produced quantity Σ_λ p_λ(X_λ) that must track a goal
/// stream while staying under a hard limit. Immutable after construction;
/// noisy evaluation draws from the generator owned by the calling run.
class TrackingScenario {
 public:
  struct Config {
    std::vector<std::function<double(double)>> characteristics;  // true p_λ
    Eigen::VectorXd lower;  // decision box, one component per unknown
    Eigen::VectorXd upper;
    double safety_limit = 0.0;
    double goal_margin = 5.0;  // exploration-gate tolerance on goal satisfaction
    std::vector<KernelSpec> kernels;
    double noise_std = 1.0;
    double gp_noise_variance = 1.0;
    ReferenceSignal reference;
    // Bootstrap observations: fixed inputs reused on every run when nonempty,
    // otherwise per-run uniform draws from [seed_lo, seed_hi].
    std::vector<double> fixed_seed_inputs;
    double seed_lo = 0.5;
    double seed_hi = 8.0;
    int seed_count = 2;  // points per unknown
  };

  explicit TrackingScenario(Config cfg);

  int decision_dim() const { return static_cast<int>(cfg_.characteristics.size()); }
  int num_unknowns() const { return decision_dim(); }
  const Config& config() const { return cfg_; }
  const ReferenceSignal& reference() const { return cfg_.reference; }
  double safety_limit() const { return cfg_.safety_limit; }

  /// True p_λ at one input; throws std::out_of_range outside the box.
  double true_value(int unknown, double x) const;
  /// Σ_λ p_λ(X_λ), the delivered quantity in the true environment.
  double produced_true(const Eigen::VectorXd& decision) const;
  /// Noisy observation of p_λ.
  double observe(int unknown, double x, Rng& noise) const;

  /// Model input of unknown λ for a decision (its own component).
  std::vector<Eigen::VectorXd> model_inputs(const Eigen::VectorXd& decision) const;

  /// Bootstrap observation sets, one per unknown. Validates that every seed
  /// input is truly safe when the remaining unknowns sit at their lower bound.
  SafeSet draw_safe_seed(Rng& draw, Rng& noise) const;

  /// Decision in use before the first solve (first seed input per unknown).
  Eigen::VectorXd initial_decision(const SafeSet& seed) const;

  /// Known goal-tracking cost (goal - Σ μ_λ)^2.
  double cost(const std::vector<GaussianProcess>& models, const Eigen::VectorXd& decision,
              double goal) const;
  /// Σ_λ μ_λ at the decision.
  double produced_mean(const std::vector<GaussianProcess>& models,
                       const Eigen::VectorXd& decision) const;
  /// Surrogate safety constraint Σ_λ (μ_λ + β σ_λ) − limit (≤ 0 feasible).
  std::function<double(const Eigen::VectorXd&)> safety_constraint(
      const std::vector<GaussianProcess>& models, double beta_t) const;

  /// |min(goal, limit) − delivered|: gap to the achievable target.
  double regret(double goal, double delivered) const;

  /// Exploration gate: goal unchanged from the previous step and that step's
  /// observed total within ±goal_margin of it.
  bool exploration_rule(bool has_prev, double prev_goal, double prev_observed_total,
                        double goal) const;

 private:
  Config cfg_;
};

}  // namespace arteo
