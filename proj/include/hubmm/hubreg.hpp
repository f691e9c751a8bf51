#ifndef HUBMM_HUBREG_HPP
#define HUBMM_HUBREG_HPP

// Joint regression and scale estimation by minimizing Huber's criterion
//
//   L(beta, sigma) = N alpha sigma + sigma * sum_i rho_c((y_i - x_i^T beta) / sigma)
//
// with a block-wise majorization-minimization solver. Each iteration
// rescales sigma by tau^lambda and then moves beta along
// delta = X^+ psi_c(r / sigma) sigma with step mu. With unit steps this is
// the plain MM scheme; the adaptive lambda and mu are one-step estimates of
// the exact line searches in log-scale and in beta.

#include "hubmm/linalg.hpp"
#include "hubmm/loss.hpp"

#include <optional>
#include <vector>

namespace hubmm {

class RegressionProblem {
public:
  // When `intercept` is set a leading column of ones is prepended to x.
  // Requires rows(x) == size(y), N > p and finite entries.
  RegressionProblem(Vector y, const DenseMatrix& x, bool intercept = false);

  const Vector& y() const { return y_; }
  const DenseMatrix& x() const { return x_; }
  bool intercept() const { return intercept_; }
  Eigen::Index n() const { return x_.rows(); }
  Eigen::Index p() const { return x_.cols(); }

private:
  Vector y_;
  DenseMatrix x_;
  bool intercept_;
};

struct SolverConfig {
  HuberKernel kernel{};
  double tol = 1e-6;
  int max_iter = 500;
  bool adaptive_steps = true;
  // Lower bound on sigma; when unset, 1e-12 times a robust scale of y.
  std::optional<double> sigma_floor;
  bool record_trace = false;

  void validate() const;
};

struct StepState {
  double mu = 0.0;
  double lambda = 1.0;
};

// One entry per iteration, taken after both block updates.
struct TraceEntry {
  double criterion;
  double tau_lambda;    // multiplicative scale update actually applied
  double relative_step; // ||mu delta|| / ||beta|| (absolute when beta = 0)
  double lambda;
  double mu;
};

struct InitialGuess {
  Vector beta;
  double sigma;
};

struct FitResult {
  Vector beta;
  double sigma = 0.0;
  int iterations = 0;
  bool converged = false;
  // Residuals vanished and sigma was clamped to the floor.
  bool perfect_fit = false;
  std::vector<TraceEntry> trace;
};

// 1.4826 * median(|v - median(v)|)
double robust_scale(const Vector& v);
double median(Vector v);

double criterion(const HuberKernel& kernel, const Vector& residual, double sigma);
double criterion(const RegressionProblem& prob, const HuberKernel& kernel, const Vector& beta,
                 double sigma);

// psi_c(r / sigma) * sigma
Vector pseudo_residual(const HuberKernel& kernel, const Vector& residual, double sigma);
Vector pseudo_residual(const RegressionProblem& prob, const HuberKernel& kernel, const Vector& beta,
                       double sigma);

// tau = ||psi_c(r / sigma)|| / sqrt(2 N alpha). Throws DegenerateScale when
// the winsorized residuals are all zero.
double scale_multiplier(const HuberKernel& kernel, const Vector& residual, double sigma);
double scale_multiplier(const RegressionProblem& prob, const HuberKernel& kernel,
                        const Vector& beta, double sigma);

// delta = X^+ pseudo_residual(beta, sigma)
Vector regression_direction(const RegressionProblem& prob, const Pseudoinverse& pinv,
                            const HuberKernel& kernel, const Vector& beta, double sigma);

// One step of the log-scale line search:
//   lambda_prev + log(||psi_c(r~ / tau^lambda_prev)|| / sqrt(2 alpha N)) / log(tau)
// where r~ = r / sigma. Returns 1 when |log tau| < 1e-12.
double scale_step_size(const HuberKernel& kernel, const Vector& residuals_std, double tau,
                       double lambda_prev);

// One IRWLS step for min_mu sum rho((r - mu z) / sigma), started at mu_prev.
// Returns 0 when ||z||_w^2 vanishes.
double regression_step_size(const HuberKernel& kernel, const Vector& residual, const Vector& z,
                            double sigma, double mu_prev);

// beta = X^+ y, sigma = robust_scale of the LSE residuals (RMS when that is 0).
InitialGuess default_initial_guess(const RegressionProblem& prob, const Pseudoinverse& pinv);

double default_sigma_floor(const Vector& y);

FitResult fit(const RegressionProblem& prob, const SolverConfig& cfg,
              const std::optional<InitialGuess>& init = std::nullopt);

// Same as above with a factorization of prob.x() supplied by the caller.
FitResult fit(const RegressionProblem& prob, const Pseudoinverse& pinv, const SolverConfig& cfg,
              const std::optional<InitialGuess>& init = std::nullopt);

} // namespace hubmm

#endif // HUBMM_HUBREG_HPP
