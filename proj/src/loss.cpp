#include "hubmm/loss.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hubmm {

namespace {

void check_threshold(double c) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::domain_error("Huber threshold must be positive and finite, got " + std::to_string(c));
}

// 1 - F_1(x) = erfc(sqrt(x/2)); kept separate so large thresholds do not
// lose the tail to cancellation.
double chi2_1_survival(double x) { return std::erfc(std::sqrt(0.5 * x)); }

} // namespace

double chi2_cdf(double x, int dof) {
  if (!(x >= 0.0))
    throw std::domain_error("chi2_cdf: x must be nonnegative");
  const double f1 = std::erf(std::sqrt(0.5 * x));
  switch (dof) {
  case 1:
    return f1;
  case 3: {
    const double f3 = f1 - std::sqrt(2.0 * x / std::numbers::pi) * std::exp(-0.5 * x);
    return f3 < 0.0 ? 0.0 : f3;
  }
  default:
    throw std::domain_error("chi2_cdf: only 1 and 3 degrees of freedom are supported, got " +
                            std::to_string(dof));
  }
}

double consistency_factor(double c) {
  check_threshold(c);
  const double c2 = c * c;
  return 0.5 * c2 * chi2_1_survival(c2) + 0.5 * chi2_cdf(c2, 3);
}

HuberKernel::HuberKernel(double c) : c_(c), alpha_(0.0) {
  check_threshold(c);
  alpha_ = consistency_factor(c);
}

HuberKernel::HuberKernel(double c, double alpha, bool dof_corrected)
    : c_(c), alpha_(alpha), dof_corrected_(dof_corrected) {}

HuberKernel HuberKernel::with_dof_correction(double c, long n, long p) {
  check_threshold(c);
  if (n <= 0 || p < 0 || p >= n)
    throw std::domain_error("degrees-of-freedom correction needs 0 <= p < n");
  const double factor = static_cast<double>(n - p) / static_cast<double>(n);
  return HuberKernel(c, consistency_factor(c) * factor, true);
}

double HuberKernel::rho(double x) const {
  const double ax = std::abs(x);
  if (ax <= c_)
    return 0.5 * x * x;
  return 0.5 * (2.0 * c_ * ax - c_ * c_);
}

double HuberKernel::psi(double x) const {
  if (x > c_)
    return c_;
  if (x < -c_)
    return -c_;
  return x;
}

double HuberKernel::chi(double x) const {
  const double s = psi(x);
  return 0.5 * s * s;
}

double HuberKernel::weight(double x) const {
  const double ax = std::abs(x);
  return ax <= c_ ? 1.0 : c_ / ax;
}

Eigen::VectorXd HuberKernel::rho(const Eigen::VectorXd& x) const {
  return x.unaryExpr([this](double v) { return rho(v); });
}

Eigen::VectorXd HuberKernel::psi(const Eigen::VectorXd& x) const {
  return x.unaryExpr([this](double v) { return psi(v); });
}

Eigen::VectorXd HuberKernel::chi(const Eigen::VectorXd& x) const {
  return x.unaryExpr([this](double v) { return chi(v); });
}

Eigen::VectorXd HuberKernel::weight(const Eigen::VectorXd& x) const {
  return x.unaryExpr([this](double v) { return weight(v); });
}

} // namespace hubmm
