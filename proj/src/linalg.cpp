#include "hubmm/linalg.hpp"

#include "hubmm/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace hubmm {

namespace {

std::string shape(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

} // namespace

void require_finite(const DenseMatrix& m, const char* what) {
  if (!m.allFinite())
    throw std::invalid_argument(std::string(what) + " contains non-finite entries");
}

Pseudoinverse::Pseudoinverse(const DenseMatrix& x) : rows_(x.rows()), cols_(x.cols()) {
  if (rows_ < 1 || cols_ < 1)
    throw DimensionMismatch("pseudoinverse of an empty matrix (" + shape(rows_, cols_) + ")");
  if (rows_ < cols_)
    throw RankDeficient("pseudoinverse needs rows >= cols, got " + shape(rows_, cols_));
  require_finite(x, "design matrix");

  qr_.compute(x);
  // Pivoting orders |R_jj| non-increasingly.
  const auto diag = qr_.matrixR().diagonal().cwiseAbs();
  const double largest = diag(0);
  const double smallest = diag(cols_ - 1);
  const double tol = static_cast<double>(rows_) * std::numeric_limits<double>::epsilon() * largest;
  if (!(largest > 0.0) || smallest < tol)
    throw RankDeficient("design matrix " + shape(rows_, cols_) +
                        " is numerically rank deficient (pivot ratio " +
                        std::to_string(largest > 0.0 ? smallest / largest : 0.0) + ")");
}

Vector Pseudoinverse::apply(const Vector& v) const {
  if (v.size() != rows_)
    throw DimensionMismatch("apply_pinv: vector of length " + std::to_string(v.size()) +
                            " for a " + shape(rows_, cols_) + " factorization");
  return qr_.solve(v);
}

Pseudoinverse factorize(const DenseMatrix& x) { return Pseudoinverse(x); }

Vector apply_pinv(const Pseudoinverse& pinv, const Vector& v) { return pinv.apply(v); }

double weighted_inner(const Vector& a, const Vector& b, const Vector& w) {
  if (a.size() != b.size() || a.size() != w.size())
    throw DimensionMismatch("weighted_inner: lengths " + std::to_string(a.size()) + ", " +
                            std::to_string(b.size()) + ", " + std::to_string(w.size()));
  return (a.array() * b.array() * w.array()).sum();
}

double weighted_norm_sq(const Vector& a, const Vector& w) { return weighted_inner(a, a, w); }

} // namespace hubmm
