#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "arteo/kernel.hpp"

namespace arteo {

struct Observation {
  Eigen::VectorXd input;
  double value = 0.0;
};

struct Prediction {
  double mean = 0.0;
  double std = 0.0;
};

/// Exact zero-mean GP regressor conditioned once on a fixed observation set.
/// Posterior:
///   mean(x) = k(x)^T (K + noise I)^-1 y,
///   var(x)  = k(x,x) - k(x)^T (K + noise I)^-1 k(x)
/// backed by a cached Cholesky factorization. A jitter of 1e-8 * signal_variance
/// is added to the factorized matrix, escalating tenfold up to 1e-2 * signal_variance
/// before the factorization is declared failed.
///
/// The observation set is immutable after construction, but predict() keeps a
/// per-object scratch buffer and a one-query memo (solver evaluations probe the
/// same point through several closures in a row). Concurrent predicts on the
/// SAME instance therefore need external synchronization; distinct instances,
/// including copies, are independent.
class GaussianProcess {
 public:
  /// Unconditioned prior (mean 0, std = sqrt(signal_variance) everywhere).
  explicit GaussianProcess(KernelSpec kernel, double noise_variance);

  /// Conditioned model. Throws on inconsistent input dimensions, negative
  /// noise variance, non-finite data, or unrecoverable factorization failure.
  GaussianProcess(KernelSpec kernel, double noise_variance, std::vector<Observation> data);

  /// Posterior at one point; negative variances from roundoff clamp to zero.
  Prediction predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  int size() const { return static_cast<int>(observations_.size()); }
  /// -1 while unconditioned (any query dimension accepted).
  int input_dim() const { return input_dim_; }
  const KernelSpec& kernel() const { return kernel_; }
  double noise_variance() const { return noise_variance_; }
  const std::vector<Observation>& observations() const { return observations_; }
  /// Gram matrix of the conditioning set (no noise, no jitter). Empty when unconditioned.
  const Eigen::MatrixXd& gram() const { return gram_; }
  /// Jitter actually added to make the factorization succeed.
  double applied_jitter() const { return applied_jitter_; }

 private:
  KernelSpec kernel_;
  double noise_variance_ = 0.0;
  std::vector<Observation> observations_;
  int input_dim_ = -1;
  Eigen::MatrixXd inputs_;  // one observation per row
  Eigen::MatrixXd gram_;
  Eigen::LLT<Eigen::MatrixXd> llt_;  // of K + (noise + jitter) I
  Eigen::VectorXd alpha_;            // (K + noise I)^-1 y
  double applied_jitter_ = 0.0;

  // predict() scratch: kernel row reused as the in-place triangular solve
  // target, plus a one-entry memo of the last query (see class comment).
  mutable Eigen::VectorXd kvec_;
  mutable Eigen::VectorXd memo_x_;
  mutable Prediction memo_p_;
  mutable bool memo_valid_ = false;
};

/// Functional aliases for the class operations.
GaussianProcess gp_condition(const KernelSpec& kernel, double noise_variance,
                             std::vector<Observation> data);
Prediction gp_predict(const GaussianProcess& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Joint draw from the prior at the given points. Exact duplicate points map to
/// the same latent value. Deterministic in (points, seed).
std::vector<double> gp_sample_prior(const KernelSpec& kernel,
                                    const std::vector<Eigen::VectorXd>& points, uint64_t seed);

}  // namespace arteo
