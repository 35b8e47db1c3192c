#pragma once

#include <functional>

#include <Eigen/Dense>

#include "arteo/gp.hpp"

namespace arteo {

/// Inputs of the confidence-width schedule.
struct ConfidenceParams {
  double rkhs_bound = 1.0;     // B: bound on the unknown's norm in the kernel's space
  double noise_scale = 0.0;    // R: sub-Gaussian scale of the observation noise
  double failure_prob = 0.05;  // delta, in (0, 1)
  double gamma_running = 0.0;  // information-gain budget consumed so far (nats)

  bool operator==(const ConfidenceParams&) const = default;
};

/// Mutual-information surrogate 0.5 * ln det(I + gram / noise_variance), in nats.
/// Empty matrix yields 0. Throws std::invalid_argument for a non-square matrix
/// or non-positive noise variance.
double information_gain(const Eigen::MatrixXd& gram, double noise_variance);

/// Width multiplier beta = B + R * sqrt(2 * (gamma + 1 + ln(1/delta))).
/// Grows monotonically with gamma and with shrinking delta.
double beta(const ConfidenceParams& params);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// [mean - beta*std, mean + beta*std] at x.
Interval confidence_interval(const GaussianProcess& model,
                             const Eigen::Ref<const Eigen::VectorXd>& x, double beta_t);

enum class Monotonicity { Increasing, Decreasing };

/// Push an interval for the unknown p through a scalar form g(delta_value, p)
/// that is monotone in p: endpoint evaluation, ordered so lower <= upper.
Interval propagate_bounds(const std::function<double(double, double)>& g_form,
                          double delta_value, const Interval& p_interval, Monotonicity mono);

}  // namespace arteo
