#include "arteo/confidence.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "arteo/errors.hpp"

namespace arteo {

double information_gain(const Eigen::MatrixXd& gram, double noise_variance) {
  if (gram.rows() == 0 && gram.cols() == 0) return 0.0;
  if (gram.rows() != gram.cols())
    throw std::invalid_argument("information_gain: matrix must be square, got " +
                                std::to_string(gram.rows()) + "x" + std::to_string(gram.cols()));
  if (!(noise_variance > 0.0))
    throw std::invalid_argument("information_gain: noise_variance must be > 0, got " +
                                std::to_string(noise_variance));
  if (!gram.allFinite()) throw NumericError("information_gain: non-finite matrix");

  Eigen::MatrixXd m = gram / noise_variance;
  m.diagonal().array() += 1.0;
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericError("information_gain: factorization failed (matrix not PSD?)");
  return llt.matrixLLT().diagonal().array().log().sum();  // 0.5 * logdet = sum(log diag(L))
}

double beta(const ConfidenceParams& params) {
  if (!(params.failure_prob > 0.0 && params.failure_prob < 1.0))
    throw std::invalid_argument("beta: failure_prob must lie in (0, 1), got " +
                                std::to_string(params.failure_prob));
  if (params.noise_scale < 0.0)
    throw std::invalid_argument("beta: noise_scale must be >= 0");
  if (params.gamma_running < 0.0)
    throw std::invalid_argument("beta: gamma_running must be >= 0");
  return params.rkhs_bound +
         params.noise_scale *
             std::sqrt(2.0 * (params.gamma_running + 1.0 + std::log(1.0 / params.failure_prob)));
}

Interval confidence_interval(const GaussianProcess& model,
                             const Eigen::Ref<const Eigen::VectorXd>& x, double beta_t) {
  const Prediction p = model.predict(x);
  return Interval{p.mean - beta_t * p.std, p.mean + beta_t * p.std};
}

Interval propagate_bounds(const std::function<double(double, double)>& g_form,
                          double delta_value, const Interval& p_interval, Monotonicity mono) {
  const double at_lower = g_form(delta_value, p_interval.lower);
  const double at_upper = g_form(delta_value, p_interval.upper);
  Interval out;
  if (mono == Monotonicity::Increasing) {
    out.lower = at_lower;
    out.upper = at_upper;
  } else {
    out.lower = at_upper;
    out.upper = at_lower;
  }
  if (out.lower > out.upper) std::swap(out.lower, out.upper);  // defensive ordering
  return out;
}

}  // namespace arteo
