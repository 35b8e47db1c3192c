#include "arteo/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace arteo {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

double correlation(const KernelSpec& spec, double sq_dist) {
  switch (spec.family) {
    case KernelFamily::SquaredExponential:
      return std::exp(-0.5 * sq_dist / (spec.length_scale * spec.length_scale));
    case KernelFamily::Matern32: {
      const double r = kSqrt3 * std::sqrt(sq_dist) / spec.length_scale;
      return (1.0 + r) * std::exp(-r);
    }
  }
  return 0.0;  // unreachable
}

}  // namespace

const char* to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::SquaredExponential:
      return "squared_exponential";
    case KernelFamily::Matern32:
      return "matern32";
  }
  return "?";
}

void KernelSpec::validate() const {
  if (!(length_scale > 0.0))
    throw std::invalid_argument("kernel length_scale must be > 0, got " +
                                std::to_string(length_scale));
  if (!(signal_variance > 0.0))
    throw std::invalid_argument("kernel signal_variance must be > 0, got " +
                                std::to_string(signal_variance));
}

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  spec.validate();
  if (a.size() != b.size())
    throw DimensionError(static_cast<int>(a.size()), static_cast<int>(b.size()), "kernel_eval");
  return spec.signal_variance * correlation(spec, (a - b).squaredNorm());
}

void kernel_vector_into(const KernelSpec& spec, const Eigen::MatrixXd& inputs,
                        const Eigen::Ref<const Eigen::VectorXd>& q, Eigen::VectorXd& out) {
  spec.validate();
  if (inputs.cols() != q.size())
    throw DimensionError(static_cast<int>(inputs.cols()), static_cast<int>(q.size()),
                         "kernel_vector");
  out.resize(inputs.rows());
  out.array() = (inputs.rowwise() - q.transpose()).rowwise().squaredNorm().array();
  const double s2 = spec.signal_variance;
  if (spec.family == KernelFamily::SquaredExponential) {
    const double inv = -0.5 / (spec.length_scale * spec.length_scale);
    out.array() = s2 * (out.array() * inv).exp();
    return;
  }
  Eigen::ArrayXd r = kSqrt3 * out.array().sqrt() / spec.length_scale;
  out.array() = s2 * (1.0 + r) * (-r).exp();
}

Eigen::VectorXd kernel_vector(const KernelSpec& spec, const Eigen::MatrixXd& inputs,
                              const Eigen::VectorXd& q) {
  Eigen::VectorXd out;
  kernel_vector_into(spec, inputs, q, out);
  return out;
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& inputs) {
  spec.validate();
  const Eigen::Index n = inputs.rows();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = spec.signal_variance;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double sq = (inputs.row(i) - inputs.row(j)).squaredNorm();
      const double v = spec.signal_variance * correlation(spec, sq);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

}  // namespace arteo
