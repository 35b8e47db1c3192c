#pragma once

#include "arteo/scenario.hpp"

namespace arteo {

/// Electrical parameters of one externally-excited DC machine.
struct MotorParams {
  double armature_resistance = 0.016;  // ohm
  double armature_inductance = 1.9e-05;  // henry
  double flux_constant = 0.165;  // Vs, links torque to armature current
  double rotor_inertia = 0.025;  // kg m^2
};

MotorParams machine_one();
MotorParams machine_two();

/// Steady-state armature current drawn for a torque demand: i = T / psi_e.
/// Throws std::out_of_range outside [lo, hi].
double true_current(const MotorParams& machine, double torque, double lo = 0.0,
                    double hi = 38.0);

/// Default goal profile: five constant plateaus of eight steps each.
ReferenceSignal default_motor_reference();

struct MotorScenarioOptions {
  double safety_limit = 225.6;       // ampere, combined supply rating
  double goal_margin = 5.0;          // ampere
  double torque_lo = 0.0;            // newton-metre
  double torque_hi = 38.0;
  double noise_std = 1.0;            // ampere, sensor noise
  double gp_noise_variance = 1.0;
  double length_scale = 215.0;
  double signal_std = 180.0;
  ReferenceSignal reference;         // empty -> default_motor_reference()
  std::vector<double> fixed_seed_inputs = {2.0, 6.0};  // empty -> per-run uniform draws
  double seed_lo = 0.5;
  double seed_hi = 8.0;
  int seed_count = 2;

  bool operator==(const MotorScenarioOptions&) const = default;
};

/// Two-machine current-allocation environment: split a current goal across two
/// motors whose torque->current maps are treated as unknown.
TrackingScenario make_motor_scenario(const MotorScenarioOptions& opts = {});

/// Goal-tracking objective (Cr - sum of predicted currents)^2 - z * (sum of
/// predicted stds), each model queried at its own torque component.
double motor_objective(const Eigen::VectorXd& torques,
                       const std::vector<GaussianProcess>& models, double reference_current,
                       double z);

/// Optimistic total-current constraint sum(mu + beta*sigma) - limit; <= 0 feasible.
double motor_safety(const Eigen::VectorXd& torques,
                    const std::vector<GaussianProcess>& models, double beta_t,
                    double limit = 225.6);

/// |min(goal, limit) - produced|: distance to the achievable target.
double tracking_regret(double goal, double produced, double limit);

/// One-unknown sandbox with a linear characteristic p(x) = 0.8 x on [0, 10],
/// limit 7, margin 0.5: small enough for exhaustive-search cross-checks.
TrackingScenario make_toy_scenario();

}  // namespace arteo
