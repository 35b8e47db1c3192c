#pragma once

#include <Eigen/Dense>

#include "arteo/errors.hpp"

namespace arteo {

enum class KernelFamily { SquaredExponential, Matern32 };

const char* to_string(KernelFamily family);

/// Stationary covariance description; k(x, x) == signal_variance by construction.
struct KernelSpec {
  KernelFamily family = KernelFamily::SquaredExponential;
  double length_scale = 1.0;     // same units as the inputs
  double signal_variance = 1.0;  // output units squared

  void validate() const;  // throws std::invalid_argument on non-positive parameters

  bool operator==(const KernelSpec&) const = default;
};

/// Covariance between two points. Throws DimensionError on mismatched inputs.
double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// k(x_i, q) for every row x_i of `inputs`.
Eigen::VectorXd kernel_vector(const KernelSpec& spec, const Eigen::MatrixXd& inputs,
                              const Eigen::VectorXd& q);

/// kernel_vector writing into a caller-owned buffer (resized as needed), for
/// hot paths that cannot afford a fresh allocation per call.
void kernel_vector_into(const KernelSpec& spec, const Eigen::MatrixXd& inputs,
                        const Eigen::Ref<const Eigen::VectorXd>& q, Eigen::VectorXd& out);

/// Dense Gram matrix over the rows of `inputs` (symmetric, PSD up to roundoff).
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& inputs);

}  // namespace arteo
