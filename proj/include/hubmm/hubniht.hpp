#ifndef HUBMM_HUBNIHT_HPP
#define HUBMM_HUBNIHT_HPP

// K-sparse minimization of Huber's criterion by normalized iterative hard
// thresholding. Each iteration updates sigma exactly as the regression
// solver does, then takes
//
//   beta <- H_K(beta + mu X^T psi_c(r / sigma) sigma)
//
// where mu is one IRWLS step of the line search along the gradient
// restricted to the current support.

#include "hubmm/hubreg.hpp"

#include <memory>
#include <vector>

namespace hubmm {

/// Dictionary or measurement matrix together with its unit-norm working
/// copy. Shared between problems that only differ in y.
class SparseDesign {
public:
  explicit SparseDesign(DenseMatrix x, bool normalize_columns = true);

  const DenseMatrix& x() const { return x_; }
  // Columns scaled to unit l2 norm (identical to x() without normalization).
  const DenseMatrix& working() const { return working_; }
  const Vector& column_scales() const { return scales_; }
  bool normalize_columns() const { return normalize_; }

private:
  DenseMatrix x_;
  DenseMatrix working_;
  Vector scales_;
  bool normalize_;
};

class SparseProblem {
public:
  SparseProblem(Vector y, DenseMatrix x, Eigen::Index k, bool normalize_columns = true);
  SparseProblem(Vector y, std::shared_ptr<const SparseDesign> design, Eigen::Index k);

  const Vector& y() const { return y_; }
  const SparseDesign& design() const { return *design_; }
  Eigen::Index k() const { return k_; }
  Eigen::Index n() const { return design_->x().rows(); }
  Eigen::Index p() const { return design_->x().cols(); }

private:
  Vector y_;
  std::shared_ptr<const SparseDesign> design_;
  Eigen::Index k_;
};

struct SparseModel {
  // Coefficients on the scale of the original columns of X.
  Vector beta;
  std::vector<Eigen::Index> support; // ascending
  double sigma = 0.0;
  int iterations = 0;
  bool converged = false;
  bool perfect_fit = false;
  // Criterion in the normalized working space, one entry per iteration.
  std::vector<TraceEntry> trace;
};

// Keeps the k largest-magnitude entries; ties go to the smaller index.
Vector hard_threshold(const Vector& beta, Eigen::Index k);

std::vector<Eigen::Index> support_of(const Vector& beta);

SparseModel fit_sparse(const SparseProblem& prob, const SolverConfig& cfg);

// X beta with the original (unnormalized) columns.
Vector reconstruct(const SparseProblem& prob, const SparseModel& model);

} // namespace hubmm

#endif // HUBMM_HUBNIHT_HPP
