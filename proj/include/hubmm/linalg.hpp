#ifndef HUBMM_LINALG_HPP
#define HUBMM_LINALG_HPP

// Dense linear algebra shared by every solver.
//
// Storage convention: matrices are Eigen::MatrixXd (column-major), vectors
// Eigen::VectorXd, all indices 0-based. Row i of a design matrix is the
// predictor vector of observation i; column j is the j-th variable.

#include <Eigen/Dense>

namespace hubmm {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Reusable least-squares applicator v -> X^+ v = argmin_b ||v - X b||_2.
///
/// Backed by a column-pivoted Householder QR computed once; never forms
/// X^T X. Construction fails with RankDeficient when the smallest pivot
/// magnitude falls below rows * machine-epsilon * largest pivot.
class Pseudoinverse {
public:
  explicit Pseudoinverse(const DenseMatrix& x);

  Vector apply(const Vector& v) const;

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }

private:
  Eigen::ColPivHouseholderQR<DenseMatrix> qr_;
  Eigen::Index rows_;
  Eigen::Index cols_;
};

// Factorizes X (rows >= cols, full column rank).
Pseudoinverse factorize(const DenseMatrix& x);

Vector apply_pinv(const Pseudoinverse& pinv, const Vector& v);

// sum_i a_i b_i w_i
double weighted_inner(const Vector& a, const Vector& b, const Vector& w);
double weighted_norm_sq(const Vector& a, const Vector& w);

// Throws std::invalid_argument when any entry is NaN or infinite.
void require_finite(const DenseMatrix& m, const char* what);

} // namespace hubmm

#endif // HUBMM_LINALG_HPP
