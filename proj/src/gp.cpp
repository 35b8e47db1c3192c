#include "arteo/gp.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "arteo/errors.hpp"
#include "arteo/rng.hpp"

namespace arteo {

namespace {

constexpr double kJitterBase = 1e-8;  // relative to signal variance
constexpr double kJitterCap = 1e-2;

/// Factor A + jitter*I, escalating jitter tenfold from base until LLT succeeds.
/// Returns the jitter used; throws NumericError past the cap.
double factor_with_jitter(const Eigen::MatrixXd& a, double signal_variance,
                          Eigen::LLT<Eigen::MatrixXd>& llt) {
  if (!a.allFinite()) throw NumericError("gp: non-finite covariance matrix");
  double jitter = kJitterBase * signal_variance;
  const double cap = kJitterCap * signal_variance;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  while (true) {
    llt.compute(a + jitter * eye);
    if (llt.info() == Eigen::Success) return jitter;
    if (jitter >= cap)
      throw NumericError("gp: Cholesky factorization failed at maximum jitter " +
                         std::to_string(cap));
    jitter *= 10.0;
  }
}

}  // namespace

GaussianProcess::GaussianProcess(KernelSpec kernel, double noise_variance)
    : kernel_(std::move(kernel)), noise_variance_(noise_variance) {
  kernel_.validate();
  if (noise_variance_ < 0.0)
    throw std::invalid_argument("gp: noise_variance must be >= 0, got " +
                                std::to_string(noise_variance_));
}

GaussianProcess::GaussianProcess(KernelSpec kernel, double noise_variance,
                                 std::vector<Observation> data)
    : GaussianProcess(std::move(kernel), noise_variance) {
  observations_ = std::move(data);
  if (observations_.empty()) return;

  input_dim_ = static_cast<int>(observations_.front().input.size());
  inputs_.resize(static_cast<Eigen::Index>(observations_.size()), input_dim_);
  Eigen::VectorXd y(static_cast<Eigen::Index>(observations_.size()));
  for (size_t i = 0; i < observations_.size(); ++i) {
    const Observation& obs = observations_[i];
    if (static_cast<int>(obs.input.size()) != input_dim_)
      throw DimensionError(input_dim_, static_cast<int>(obs.input.size()),
                           "gp_condition observation " + std::to_string(i));
    if (!obs.input.allFinite() || !std::isfinite(obs.value))
      throw std::invalid_argument("gp_condition: non-finite observation at index " +
                                  std::to_string(i));
    inputs_.row(static_cast<Eigen::Index>(i)) = obs.input.transpose();
    y(static_cast<Eigen::Index>(i)) = obs.value;
  }

  gram_ = gram_matrix(kernel_, inputs_);
  Eigen::MatrixXd a = gram_;
  a.diagonal().array() += noise_variance_;
  applied_jitter_ = factor_with_jitter(a, kernel_.signal_variance, llt_);
  alpha_ = llt_.solve(y);
}

Prediction GaussianProcess::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (input_dim_ >= 0 && static_cast<int>(x.size()) != input_dim_)
    throw DimensionError(input_dim_, static_cast<int>(x.size()), "gp_predict");
  Prediction out;
  if (observations_.empty()) {
    out.mean = 0.0;
    out.std = std::sqrt(kernel_.signal_variance);
    return out;
  }
  if (memo_valid_ && memo_x_.size() == x.size() && memo_x_ == x) return memo_p_;

  kernel_vector_into(kernel_, inputs_, x, kvec_);
  out.mean = kvec_.dot(alpha_);
  // var = k(x,x) - k^T (K + noise I)^-1 k = k(x,x) - ||L^-1 k||^2.
  llt_.matrixL().solveInPlace(kvec_);
  double var = kernel_.signal_variance - kvec_.squaredNorm();
  if (var < 0.0) var = 0.0;  // roundoff guard
  out.std = std::sqrt(var);

  memo_x_ = x;
  memo_p_ = out;
  memo_valid_ = true;
  return out;
}

GaussianProcess gp_condition(const KernelSpec& kernel, double noise_variance,
                             std::vector<Observation> data) {
  return GaussianProcess(kernel, noise_variance, std::move(data));
}

Prediction gp_predict(const GaussianProcess& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return model.predict(x);
}

std::vector<double> gp_sample_prior(const KernelSpec& kernel,
                                    const std::vector<Eigen::VectorXd>& points, uint64_t seed) {
  kernel.validate();
  if (points.empty()) return {};
  const int dim = static_cast<int>(points.front().size());

  // Collapse exact duplicates so perfectly correlated points share one latent value.
  std::vector<Eigen::Index> unique_of(points.size());
  std::vector<const Eigen::VectorXd*> uniques;
  for (size_t i = 0; i < points.size(); ++i) {
    if (static_cast<int>(points[i].size()) != dim)
      throw DimensionError(dim, static_cast<int>(points[i].size()),
                           "gp_sample_prior point " + std::to_string(i));
    Eigen::Index found = -1;
    for (size_t u = 0; u < uniques.size(); ++u) {
      if (*uniques[u] == points[i]) {
        found = static_cast<Eigen::Index>(u);
        break;
      }
    }
    if (found < 0) {
      uniques.push_back(&points[i]);
      found = static_cast<Eigen::Index>(uniques.size() - 1);
    }
    unique_of[i] = found;
  }

  const Eigen::Index m = static_cast<Eigen::Index>(uniques.size());
  Eigen::MatrixXd inputs(m, dim);
  for (Eigen::Index u = 0; u < m; ++u) inputs.row(u) = uniques[static_cast<size_t>(u)]->transpose();

  Eigen::LLT<Eigen::MatrixXd> llt;
  factor_with_jitter(gram_matrix(kernel, inputs), kernel.signal_variance, llt);

  Rng rng(seed);
  Eigen::VectorXd z(m);
  for (Eigen::Index u = 0; u < m; ++u) z(u) = rng.gaussian();
  const Eigen::VectorXd values = llt.matrixL() * z;

  std::vector<double> out(points.size());
  for (size_t i = 0; i < points.size(); ++i) out[i] = values(unique_of[i]);
  return out;
}

}  // namespace arteo
