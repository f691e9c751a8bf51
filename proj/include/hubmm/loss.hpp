#ifndef HUBMM_LOSS_HPP
#define HUBMM_LOSS_HPP

#include <Eigen/Dense>

namespace hubmm {

// Thresholds giving 95% and 85% asymptotic relative efficiency under
// Gaussian errors in the known-scale regression problem.
inline constexpr double kHuberC95 = 1.345;
inline constexpr double kHuberC85 = 0.7317;

// Threshold used to express the least-squares limit without an actual infinity.
inline constexpr double kLeastSquaresC = 1e6;

// Cumulative distribution function of the chi-squared law with 1 or 3
// degrees of freedom. Throws std::domain_error for x < 0 or another dof.
double chi2_cdf(double x, int dof);

// Factor alpha = E[chi_c(e)], e ~ N(0,1), that makes the joint scale
// estimate Fisher-consistent:
//
//   alpha = c^2/2 (1 - F_1(c^2)) + 1/2 F_3(c^2)
//
// Throws std::domain_error unless c is positive and finite.
double consistency_factor(double c);

/// Huber loss family for a fixed threshold c.
///
/// rho(x)  = x^2/2 for |x| <= c, c|x| - c^2/2 otherwise
/// psi(x)  = rho'(x), x clipped to [-c, c]
/// chi(x)  = psi(x) x - rho(x) = psi(x)^2 / 2
/// weight  = psi(x) / x with weight(0) = 1
///
/// alpha is evaluated once at construction. The degrees-of-freedom variant
/// scales it by (n - p)/n, the usual small-sample correction for a
/// regression with p coefficients fitted to n observations.
class HuberKernel {
public:
  explicit HuberKernel(double c = kHuberC95);

  static HuberKernel with_dof_correction(double c, long n, long p);

  double c() const { return c_; }
  double alpha() const { return alpha_; }
  bool dof_corrected() const { return dof_corrected_; }

  double rho(double x) const;
  double psi(double x) const;
  double chi(double x) const;
  double weight(double x) const;

  Eigen::VectorXd rho(const Eigen::VectorXd& x) const;
  Eigen::VectorXd psi(const Eigen::VectorXd& x) const;
  Eigen::VectorXd chi(const Eigen::VectorXd& x) const;
  Eigen::VectorXd weight(const Eigen::VectorXd& x) const;

private:
  HuberKernel(double c, double alpha, bool dof_corrected);

  double c_;
  double alpha_;
  bool dof_corrected_ = false;
};

} // namespace hubmm

#endif // HUBMM_LOSS_HPP
