#include "hubmm/hubniht.hpp"

#include "hubmm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hubmm {

namespace {

constexpr int kMaxHalvings = 60;
constexpr double kRoundoffSlack = 1e-12;

Vector restrict_to(const Vector& v, const std::vector<Eigen::Index>& support) {
  Vector out = Vector::Zero(v.size());
  for (auto i : support)
    out[i] = v[i];
  return out;
}

DenseMatrix columns_of(const DenseMatrix& x, const std::vector<Eigen::Index>& support) {
  DenseMatrix out(x.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j)
    out.col(static_cast<Eigen::Index>(j)) = x.col(support[j]);
  return out;
}

Vector scatter(const Vector& v, const std::vector<Eigen::Index>& support, Eigen::Index p) {
  Vector out = Vector::Zero(p);
  for (std::size_t j = 0; j < support.size(); ++j)
    out[support[j]] = v[static_cast<Eigen::Index>(j)];
  return out;
}

} // namespace

SparseDesign::SparseDesign(DenseMatrix x, bool normalize_columns)
    : x_(std::move(x)), normalize_(normalize_columns) {
  if (x_.rows() < 1 || x_.cols() < 1)
    throw DimensionMismatch("sparse design matrix is empty");
  require_finite(x_, "design matrix");
  if (normalize_) {
    scales_ = x_.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < scales_.size(); ++j)
      if (!(scales_[j] > 0.0))
        throw std::invalid_argument("column " + std::to_string(j) +
                                    " of the design matrix is zero and cannot be normalized");
    working_ = x_ * scales_.cwiseInverse().asDiagonal();
  } else {
    scales_ = Vector::Ones(x_.cols());
    working_ = x_;
  }
}

SparseProblem::SparseProblem(Vector y, DenseMatrix x, Eigen::Index k, bool normalize_columns)
    : SparseProblem(std::move(y), std::make_shared<SparseDesign>(std::move(x), normalize_columns),
                    k) {}

SparseProblem::SparseProblem(Vector y, std::shared_ptr<const SparseDesign> design, Eigen::Index k)
    : y_(std::move(y)), design_(std::move(design)), k_(k) {
  if (!design_)
    throw std::invalid_argument("sparse problem without a design");
  if (y_.size() != design_->x().rows())
    throw DimensionMismatch("design matrix has " + std::to_string(design_->x().rows()) +
                            " rows but y has length " + std::to_string(y_.size()));
  require_finite(y_, "response");
  const auto limit = std::min(n(), p());
  if (k_ < 1 || k_ > limit)
    throw std::invalid_argument("sparsity budget K=" + std::to_string(k_) + " outside [1, " +
                                std::to_string(limit) + "]");
}

Vector hard_threshold(const Vector& beta, Eigen::Index k) {
  if (k < 0)
    throw std::invalid_argument("hard_threshold: negative K");
  if (k >= beta.size())
    return beta;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(beta.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&beta](Eigen::Index a, Eigen::Index b) {
                      const double fa = std::abs(beta[a]);
                      const double fb = std::abs(beta[b]);
                      return fa > fb || (fa == fb && a < b);
                    });
  Vector out = Vector::Zero(beta.size());
  for (Eigen::Index i = 0; i < k; ++i)
    out[order[i]] = beta[order[i]];
  return out;
}

std::vector<Eigen::Index> support_of(const Vector& beta) {
  std::vector<Eigen::Index> s;
  for (Eigen::Index i = 0; i < beta.size(); ++i)
    if (beta[i] != 0.0)
      s.push_back(i);
  return s;
}

SparseModel fit_sparse(const SparseProblem& prob, const SolverConfig& cfg) {
  cfg.validate();
  const HuberKernel& kernel = cfg.kernel;
  const DenseMatrix& x = prob.design().working();
  const Vector& y = prob.y();
  const double n = static_cast<double>(prob.n());
  const double floor = cfg.sigma_floor ? *cfg.sigma_floor : default_sigma_floor(y);

  SparseModel model;
  Vector beta = Vector::Zero(prob.p());
  std::vector<Eigen::Index> support;

  double sigma = robust_scale(y);
  if (!(sigma > 0.0))
    sigma = y.norm() / std::sqrt(n);
  sigma = std::max(sigma, floor);
  StepState steps;
  double mu_support = 0.0;

  for (int it = 0; it < cfg.max_iter; ++it) {
    // Drop atoms that are linear combinations of other support atoms; the
    // fitted values do not change and the budget they held is released.
    Eigen::ColPivHouseholderQR<DenseMatrix> qr;
    if (!support.empty()) {
      qr.compute(columns_of(x, support));
      if (qr.rank() < static_cast<Eigen::Index>(support.size())) {
        beta = scatter(qr.solve(x * beta), support, beta.size());
        support = support_of(beta);
        qr.compute(columns_of(x, support));
      }
    }

    const Vector r = y - x * beta;
    const Vector rs = r / sigma;
    const double psi_norm = kernel.psi(rs).norm();
    if (!(psi_norm > 0.0)) {
      model.perfect_fit = true;
      model.converged = true;
      sigma = floor;
      break;
    }
    const double tau = psi_norm / std::sqrt(2.0 * n * kernel.alpha());

    double lambda = 1.0;
    if (cfg.adaptive_steps) {
      lambda = scale_step_size(kernel, rs, tau, steps.lambda);
      if (!std::isfinite(lambda) ||
          criterion(kernel, r, sigma * std::pow(tau, lambda)) > criterion(kernel, r, sigma * tau))
        lambda = 1.0;
    }
    const double tau_lambda = std::pow(tau, lambda);
    const double sigma_next = sigma * tau_lambda;
    model.iterations = it + 1;
    if (!(sigma_next > floor)) {
      model.perfect_fit = true;
      model.converged = true;
      sigma = floor;
      break;
    }

    const Vector delta = x.transpose() * pseudo_residual(kernel, r, sigma_next);
    const auto& active = support.empty() ? support_of(hard_threshold(delta, prob.k())) : support;
    double mu = regression_step_size(kernel, r, x * restrict_to(delta, active), sigma_next, steps.mu);
    if (!(mu > 0.0) || !std::isfinite(mu))
      mu = regression_step_size(kernel, r, x * delta, sigma_next, steps.mu);
    if (!(mu > 0.0) || !std::isfinite(mu))
      mu = 0.0;

    // Halve mu until the thresholded update does not increase the criterion
    // beyond round-off.
    const double current = criterion(kernel, r, sigma_next);
    const double allowed = current + kRoundoffSlack * std::abs(current);
    Vector next = beta;
    double next_value = current;
    double accepted_mu = 0.0;
    bool support_step = false;
    for (int h = 0; h <= kMaxHalvings && mu > 0.0; ++h, mu *= 0.5) {
      Vector candidate = hard_threshold(beta + mu * delta, prob.k());
      const double value = criterion(kernel, y - x * candidate, sigma_next);
      if (value <= allowed) {
        next = std::move(candidate);
        next_value = value;
        accepted_mu = mu;
        break;
      }
    }

    // Support-preserving alternative: the regression MM step restricted to
    // the current support. Taken when it lowers the criterion further.
    if (!support.empty()) {
      const Vector ds = qr.solve(pseudo_residual(kernel, r, sigma_next));
      const Vector zs = columns_of(x, support) * ds;
      double mu_s = 1.0;
      if (cfg.adaptive_steps) {
        mu_s = regression_step_size(kernel, r, zs, sigma_next, mu_support);
        if (!std::isfinite(mu_s) ||
            criterion(kernel, r - mu_s * zs, sigma_next) > criterion(kernel, r - zs, sigma_next))
          mu_s = 1.0;
      }
      const double value = criterion(kernel, r - mu_s * zs, sigma_next);
      if (ds.allFinite() && value < next_value) {
        next = beta + scatter(mu_s * ds, support, beta.size());
        next_value = value;
        accepted_mu = mu_s;
        mu_support = mu_s;
        support_step = true;
      }
    }

    auto next_support = support_of(next);
    const bool same_support = next_support == support;
    const double change = (next - beta).norm() / std::max(beta.norm(), cfg.tol);

    beta = std::move(next);
    support = std::move(next_support);
    sigma = sigma_next;
    if (accepted_mu > 0.0 && !support_step)
      steps.mu = accepted_mu;
    steps.lambda = lambda;

    if (cfg.record_trace)
      model.trace.push_back({criterion(kernel, y - x * beta, sigma), tau_lambda, change, lambda,
                             accepted_mu});

    if (same_support && change < cfg.tol) {
      model.converged = true;
      break;
    }
  }

  // Refit jointly on the final support. Near a collapsed scale the iterations
  // above move each residual by at most c*sigma, so they can stall short of
  // the restricted optimum; the restricted problem is convex and cheap.
  // Budget freed by dependent atoms is then refilled greedily.
  if (!support.empty()) {
    const Eigen::ColPivHouseholderQR<DenseMatrix> qr(columns_of(x, support));
    std::vector<Eigen::Index> basis;
    for (Eigen::Index j = 0; j < qr.rank(); ++j)
      basis.push_back(support[static_cast<std::size_t>(qr.colsPermutation().indices()[j])]);
    SolverConfig sub = cfg;
    sub.record_trace = false;
    sub.sigma_floor = floor;

    double best = criterion(kernel, y - x * beta, sigma);
    auto try_basis = [&](std::vector<Eigen::Index> cols) {
      std::sort(cols.begin(), cols.end());
      const DenseMatrix xb = columns_of(x, cols);
      FitResult refit;
      if (xb.cols() < xb.rows()) {
        refit = fit(RegressionProblem(y, xb), sub);
      } else {
        // Square and nonsingular: the interpolant is the restricted optimum.
        refit.beta = xb.colPivHouseholderQr().solve(y);
        refit.sigma = floor;
        refit.perfect_fit = true;
      }
      const Vector candidate = scatter(refit.beta, cols, beta.size());
      const double s = std::max(refit.sigma, floor);
      if (!candidate.allFinite())
        return false;
      const double value = criterion(kernel, y - x * candidate, s);
      if (!(value <= best))
        return false;
      best = value;
      beta = candidate;
      sigma = s;
      model.perfect_fit = model.perfect_fit || refit.perfect_fit;
      return true;
    };

    try_basis(basis);
    while (static_cast<Eigen::Index>(basis.size()) < std::min(prob.k(), prob.n())) {
      // Atom most aligned with the residual outside span(basis).
      const DenseMatrix q = Eigen::HouseholderQR<DenseMatrix>(columns_of(x, basis)).householderQ() *
                            DenseMatrix::Identity(prob.n(), static_cast<Eigen::Index>(basis.size()));
      const Vector r = y - x * beta;
      Eigen::Index pick = -1;
      double score = 1e-12 * y.norm();
      for (Eigen::Index j = 0; j < prob.p(); ++j) {
        if (std::find(basis.begin(), basis.end(), j) != basis.end())
          continue;
        const Vector a = x.col(j) - q * (q.transpose() * x.col(j));
        const double an = a.norm();
        if (an <= 1e-8 * x.col(j).norm())
          continue;
        const double sj = std::abs(a.dot(r)) / an;
        if (sj > score) {
          score = sj;
          pick = j;
        }
      }
      if (pick < 0)
        break;
      basis.push_back(pick);
      if (!try_basis(basis))
        break;
    }
  }

  model.beta = beta.cwiseQuotient(prob.design().column_scales());
  model.support = support_of(model.beta);
  model.sigma = sigma;
  return model;
}

Vector reconstruct(const SparseProblem& prob, const SparseModel& model) {
  if (model.beta.size() != prob.p())
    throw DimensionMismatch("sparse model has " + std::to_string(model.beta.size()) +
                            " coefficients, design has " + std::to_string(prob.p()) + " columns");
  return prob.design().x() * model.beta;
}

} // namespace hubmm
