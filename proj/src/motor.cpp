#include "arteo/motor.hpp"

#include <cmath>
#include <stdexcept>

#include "arteo/errors.hpp"

namespace arteo {

namespace {

void check_pair(const Eigen::VectorXd& torques, const std::vector<GaussianProcess>& models,
                const char* where) {
  if (torques.size() != static_cast<Eigen::Index>(models.size()))
    throw DimensionError(static_cast<int>(models.size()), static_cast<int>(torques.size()),
                         where);
}

}  // namespace

MotorParams machine_one() { return {0.016, 1.9e-05, 0.165, 0.025}; }
MotorParams machine_two() { return {0.01, 1.5e-05, 0.165, 0.025}; }

double true_current(const MotorParams& machine, double torque, double lo, double hi) {
  if (machine.flux_constant <= 0.0)
    throw std::invalid_argument("flux constant must be positive");
  if (!(torque >= lo && torque <= hi))
    throw std::out_of_range("torque " + std::to_string(torque) + " outside [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return torque / machine.flux_constant;
}

ReferenceSignal default_motor_reference() {
  // Third plateau (240 A) exceeds what the supply limit allows: the tracker
  // must settle at the limit instead of the goal there.
  return ReferenceSignal({{8, 120.0}, {8, 180.0}, {8, 240.0}, {8, 160.0}, {8, 90.0}});
}

TrackingScenario make_motor_scenario(const MotorScenarioOptions& opts) {
  TrackingScenario::Config cfg;
  const MotorParams m1 = machine_one(), m2 = machine_two();
  const double lo = opts.torque_lo, hi = opts.torque_hi;
  cfg.characteristics = {
      [m1, lo, hi](double t) { return true_current(m1, t, lo, hi); },
      [m2, lo, hi](double t) { return true_current(m2, t, lo, hi); },
  };
  cfg.lower = Eigen::Vector2d(lo, lo);
  cfg.upper = Eigen::Vector2d(hi, hi);
  cfg.safety_limit = opts.safety_limit;
  cfg.goal_margin = opts.goal_margin;
  KernelSpec k;
  k.family = KernelFamily::SquaredExponential;
  k.length_scale = opts.length_scale;
  k.signal_variance = opts.signal_std * opts.signal_std;
  cfg.kernels = {k, k};
  cfg.noise_std = opts.noise_std;
  cfg.gp_noise_variance = opts.gp_noise_variance;
  cfg.reference = opts.reference.horizon() > 0 ? opts.reference : default_motor_reference();
  cfg.fixed_seed_inputs = opts.fixed_seed_inputs;
  cfg.seed_lo = opts.seed_lo;
  cfg.seed_hi = opts.seed_hi;
  cfg.seed_count = opts.seed_count;
  return TrackingScenario(std::move(cfg));
}

double motor_objective(const Eigen::VectorXd& torques,
                       const std::vector<GaussianProcess>& models, double reference_current,
                       double z) {
  check_pair(torques, models, "motor_objective");
  double mu_sum = 0.0, sigma_sum = 0.0;
  Eigen::Matrix<double, 1, 1> v;  // solver calls this per candidate; stay off the heap
  for (Eigen::Index i = 0; i < torques.size(); ++i) {
    v[0] = torques[i];
    const Prediction p = models[static_cast<size_t>(i)].predict(v);
    mu_sum += p.mean;
    sigma_sum += p.std;
  }
  const double gap = reference_current - mu_sum;
  return gap * gap - z * sigma_sum;
}

double motor_safety(const Eigen::VectorXd& torques,
                    const std::vector<GaussianProcess>& models, double beta_t, double limit) {
  check_pair(torques, models, "motor_safety");
  double ucb = 0.0;
  Eigen::Matrix<double, 1, 1> v;
  for (Eigen::Index i = 0; i < torques.size(); ++i) {
    v[0] = torques[i];
    const Prediction p = models[static_cast<size_t>(i)].predict(v);
    ucb += p.mean + beta_t * p.std;
  }
  return ucb - limit;
}

double tracking_regret(double goal, double produced, double limit) {
  return std::abs(std::min(goal, limit) - produced);
}

TrackingScenario make_toy_scenario() {
  TrackingScenario::Config cfg;
  cfg.characteristics = {[](double x) { return 0.8 * x; }};
  cfg.lower = Eigen::VectorXd::Constant(1, 0.0);
  cfg.upper = Eigen::VectorXd::Constant(1, 10.0);
  cfg.safety_limit = 7.0;
  cfg.goal_margin = 0.5;
  KernelSpec k;
  k.family = KernelFamily::SquaredExponential;
  k.length_scale = 10.0;
  k.signal_variance = 16.0;
  cfg.kernels = {k};
  cfg.noise_std = 0.01;
  cfg.gp_noise_variance = 0.01 * 0.01;
  cfg.reference = ReferenceSignal({{12, 4.0}});
  cfg.fixed_seed_inputs = {1.0, 2.0};
  cfg.seed_count = 2;
  return TrackingScenario(std::move(cfg));
}

}  // namespace arteo
