#include "hubmm/hubreg.hpp"

#include "hubmm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hubmm {

namespace {

constexpr double kMadToSigma = 1.4826;

void require_positive_sigma(double sigma, const char* where) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument(std::string(where) + ": sigma must be positive and finite");
}

void require_same_length(const Vector& a, const Vector& b, const char* where) {
  if (a.size() != b.size())
    throw DimensionMismatch(std::string(where) + ": lengths " + std::to_string(a.size()) +
                            " and " + std::to_string(b.size()));
}

Vector residual_of(const RegressionProblem& prob, const Vector& beta) {
  if (beta.size() != prob.p())
    throw DimensionMismatch("beta has length " + std::to_string(beta.size()) + ", expected " +
                            std::to_string(prob.p()));
  return prob.y() - prob.x() * beta;
}

} // namespace

RegressionProblem::RegressionProblem(Vector y, const DenseMatrix& x, bool intercept)
    : y_(std::move(y)), intercept_(intercept) {
  if (x.rows() != y_.size())
    throw DimensionMismatch("design matrix has " + std::to_string(x.rows()) +
                            " rows but y has length " + std::to_string(y_.size()));
  if (intercept) {
    x_.resize(x.rows(), x.cols() + 1);
    x_.col(0).setOnes();
    x_.rightCols(x.cols()) = x;
  } else {
    x_ = x;
  }
  if (x_.cols() < 1)
    throw DimensionMismatch("design matrix has no columns");
  if (x_.rows() <= x_.cols())
    throw DimensionMismatch("regression needs N > p, got N=" + std::to_string(x_.rows()) +
                            ", p=" + std::to_string(x_.cols()));
  require_finite(x_, "design matrix");
  require_finite(y_, "response");
}

void SolverConfig::validate() const {
  if (!(tol > 0.0))
    throw std::invalid_argument("solver tolerance must be positive");
  if (max_iter < 1)
    throw std::invalid_argument("max_iter must be at least 1");
  if (sigma_floor && !(*sigma_floor > 0.0))
    throw std::invalid_argument("sigma_floor must be positive");
}

double median(Vector v) {
  if (v.size() == 0)
    throw std::invalid_argument("median of an empty vector");
  const auto n = v.size();
  auto* first = v.data();
  auto* mid = first + n / 2;
  std::nth_element(first, mid, first + n);
  const double upper = *mid;
  if (n % 2 == 1)
    return upper;
  const double lower = *std::max_element(first, mid);
  return 0.5 * (lower + upper);
}

double robust_scale(const Vector& v) {
  const double m = median(v);
  return kMadToSigma * median((v.array() - m).abs().matrix());
}

double default_sigma_floor(const Vector& y) {
  double s = robust_scale(y);
  if (!(s > 0.0))
    s = y.cwiseAbs().maxCoeff();
  const double floor = 1e-12 * s;
  return floor > 0.0 ? floor : std::numeric_limits<double>::min();
}

double criterion(const HuberKernel& kernel, const Vector& residual, double sigma) {
  require_positive_sigma(sigma, "criterion");
  const double n = static_cast<double>(residual.size());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < residual.size(); ++i)
    sum += kernel.rho(residual[i] / sigma);
  return n * kernel.alpha() * sigma + sigma * sum;
}

double criterion(const RegressionProblem& prob, const HuberKernel& kernel, const Vector& beta,
                 double sigma) {
  return criterion(kernel, residual_of(prob, beta), sigma);
}

Vector pseudo_residual(const HuberKernel& kernel, const Vector& residual, double sigma) {
  require_positive_sigma(sigma, "pseudo_residual");
  return kernel.psi(residual / sigma) * sigma;
}

Vector pseudo_residual(const RegressionProblem& prob, const HuberKernel& kernel, const Vector& beta,
                       double sigma) {
  return pseudo_residual(kernel, residual_of(prob, beta), sigma);
}

double scale_multiplier(const HuberKernel& kernel, const Vector& residual, double sigma) {
  require_positive_sigma(sigma, "scale_multiplier");
  const double norm = kernel.psi(residual / sigma).norm();
  if (!(norm > 0.0))
    throw DegenerateScale("all residuals are zero; the scale update is undefined");
  const double n = static_cast<double>(residual.size());
  return norm / std::sqrt(2.0 * n * kernel.alpha());
}

double scale_multiplier(const RegressionProblem& prob, const HuberKernel& kernel,
                        const Vector& beta, double sigma) {
  return scale_multiplier(kernel, residual_of(prob, beta), sigma);
}

Vector regression_direction(const RegressionProblem& prob, const Pseudoinverse& pinv,
                            const HuberKernel& kernel, const Vector& beta, double sigma) {
  return pinv.apply(pseudo_residual(prob, kernel, beta, sigma));
}

double scale_step_size(const HuberKernel& kernel, const Vector& residuals_std, double tau,
                       double lambda_prev) {
  if (!(tau > 0.0))
    throw std::invalid_argument("scale_step_size: tau must be positive");
  const double log_tau = std::log(tau);
  if (std::abs(log_tau) < 1e-12)
    return 1.0;
  const double n = static_cast<double>(residuals_std.size());
  const double shrink = std::pow(tau, lambda_prev);
  const double norm = kernel.psi(residuals_std / shrink).norm() / std::sqrt(2.0 * kernel.alpha() * n);
  return lambda_prev + std::log(norm) / log_tau;
}

double regression_step_size(const HuberKernel& kernel, const Vector& residual, const Vector& z,
                            double sigma, double mu_prev) {
  require_positive_sigma(sigma, "regression_step_size");
  require_same_length(residual, z, "regression_step_size");
  const Vector w = kernel.weight((residual - mu_prev * z) / sigma);
  const double denom = weighted_norm_sq(z, w);
  if (!(denom > 0.0))
    return 0.0;
  return weighted_inner(residual, z, w) / denom;
}

InitialGuess default_initial_guess(const RegressionProblem& prob, const Pseudoinverse& pinv) {
  InitialGuess g{pinv.apply(prob.y()), 0.0};
  const Vector r = prob.y() - prob.x() * g.beta;
  g.sigma = robust_scale(r);
  if (!(g.sigma > 0.0))
    g.sigma = r.norm() / std::sqrt(static_cast<double>(r.size()));
  return g;
}

FitResult fit(const RegressionProblem& prob, const SolverConfig& cfg,
              const std::optional<InitialGuess>& init) {
  const Pseudoinverse pinv(prob.x());
  return fit(prob, pinv, cfg, init);
}

FitResult fit(const RegressionProblem& prob, const Pseudoinverse& pinv, const SolverConfig& cfg,
              const std::optional<InitialGuess>& init) {
  cfg.validate();
  if (pinv.rows() != prob.n() || pinv.cols() != prob.p())
    throw DimensionMismatch("factorization does not match the regression problem");

  const HuberKernel& kernel = cfg.kernel;
  const DenseMatrix& x = prob.x();
  const Vector& y = prob.y();
  const double floor = cfg.sigma_floor ? *cfg.sigma_floor : default_sigma_floor(y);

  InitialGuess start = init ? *init : default_initial_guess(prob, pinv);
  if (start.beta.size() != prob.p())
    throw DimensionMismatch("initial beta has length " + std::to_string(start.beta.size()) +
                            ", expected " + std::to_string(prob.p()));
  if (!std::isfinite(start.sigma) || start.sigma < 0.0)
    throw std::invalid_argument("initial sigma must be finite and nonnegative");

  FitResult res;
  Vector beta = std::move(start.beta);
  double sigma = std::max(start.sigma, floor);
  StepState steps;

  for (int n = 0; n < cfg.max_iter; ++n) {
    const Vector r = y - x * beta;
    const Vector rs = r / sigma;
    const double psi_norm = kernel.psi(rs).norm();
    if (!(psi_norm > 0.0)) {
      res.perfect_fit = true;
      res.converged = true;
      sigma = floor;
      break;
    }
    const double tau = psi_norm / std::sqrt(2.0 * static_cast<double>(prob.n()) * kernel.alpha());

    double lambda = 1.0;
    if (cfg.adaptive_steps) {
      lambda = scale_step_size(kernel, rs, tau, steps.lambda);
      if (!std::isfinite(lambda) ||
          criterion(kernel, r, sigma * std::pow(tau, lambda)) > criterion(kernel, r, sigma * tau))
        lambda = 1.0;
    }
    const double tau_lambda = std::pow(tau, lambda);
    const double sigma_next = sigma * tau_lambda;
    res.iterations = n + 1;
    if (!(sigma_next > floor)) {
      res.perfect_fit = true;
      res.converged = true;
      sigma = floor;
      break;
    }

    const Vector delta = pinv.apply(pseudo_residual(kernel, r, sigma_next));
    const Vector z = x * delta;
    double mu = 1.0;
    if (cfg.adaptive_steps) {
      mu = regression_step_size(kernel, r, z, sigma_next, steps.mu);
      if (!std::isfinite(mu) ||
          criterion(kernel, r - mu * z, sigma_next) > criterion(kernel, r - z, sigma_next))
        mu = 1.0;
    }

    const Vector step = mu * delta;
    const double beta_norm = beta.norm();
    const double rel = beta_norm > 0.0 ? step.norm() / beta_norm : step.norm();
    beta += step;
    sigma = sigma_next;
    steps = StepState{mu, lambda};

    if (cfg.record_trace)
      res.trace.push_back({criterion(kernel, y - x * beta, sigma), tau_lambda, rel, lambda, mu});

    if (rel < cfg.tol && std::abs(tau_lambda - 1.0) < cfg.tol) {
      res.converged = true;
      break;
    }
  }

  res.beta = std::move(beta);
  res.sigma = sigma;
  return res;
}

} // namespace hubmm
