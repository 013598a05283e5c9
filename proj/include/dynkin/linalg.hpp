#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dynkin/errors.hpp"

namespace dynkin {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using IndexSet = std::vector<Index>;

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
///
/// Hand-rolled so that a breakdown reports which pivot failed; failure of the
/// factorization is exactly the positive-definiteness test used throughout.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const Matrix& a);

  const Matrix& lower() const { return l_; }
  Index dim() const { return l_.rows(); }

  /// log det(A) = 2 sum log L(i,i); computed in log space.
  double log_det() const;

  Matrix solve(const Matrix& rhs) const;

  /// A^{-1}, symmetrized.
  Matrix inverse() const;

 private:
  Matrix l_;
};

/// Inverse of a symmetric positive definite matrix, symmetrized.
Matrix spd_inverse(const Matrix& a);

/// Validates an index subset of [0,n): in range, no duplicates.
/// Returns the set in the order given.
IndexSet checked_index_set(const IndexSet& subset, Index n, const char* what);

/// Ascending complement of `subset` in [0,n). `subset` may be in any order.
IndexSet complement_of(const IndexSet& subset, Index n);

Matrix submatrix(const Matrix& m, const IndexSet& rows, const IndexSet& cols);

double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace dynkin
