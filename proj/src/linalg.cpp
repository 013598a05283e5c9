#include "dynkin/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dynkin {

CholeskyFactor::CholeskyFactor(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw StructuralError("cholesky: matrix is not square");
  }
  const Index n = a.rows();
  l_ = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double diag = a(j, j) - l_.row(j).head(j).squaredNorm();
    if (!(diag > 0.0) || !std::isfinite(diag)) {
      throw NumericalError(
          "cholesky: pivot " + std::to_string(j) + " is not positive (matrix not positive definite)", j);
    }
    l_(j, j) = std::sqrt(diag);
    for (Index i = j + 1; i < n; ++i) {
      l_(i, j) = (a(i, j) - l_.row(i).head(j).dot(l_.row(j).head(j))) / l_(j, j);
    }
  }
}

double CholeskyFactor::log_det() const {
  return 2.0 * l_.diagonal().array().log().sum();
}

Matrix CholeskyFactor::solve(const Matrix& rhs) const {
  Matrix y = l_.triangularView<Eigen::Lower>().solve(rhs);
  return l_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix CholeskyFactor::inverse() const {
  Matrix inv = solve(Matrix::Identity(dim(), dim()));
  return 0.5 * (inv + inv.transpose());
}

Matrix spd_inverse(const Matrix& a) { return CholeskyFactor(a).inverse(); }

IndexSet checked_index_set(const IndexSet& subset, Index n, const char* what) {
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (Index i : subset) {
    if (i < 0 || i >= n) {
      throw StructuralError(std::string(what) + ": index " + std::to_string(i) + " out of range [0," +
                            std::to_string(n) + ")");
    }
    if (seen[static_cast<std::size_t>(i)]) {
      throw StructuralError(std::string(what) + ": duplicate index " + std::to_string(i));
    }
    seen[static_cast<std::size_t>(i)] = 1;
  }
  return subset;
}

IndexSet complement_of(const IndexSet& subset, Index n) {
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (Index i : subset) in[static_cast<std::size_t>(i)] = 1;
  IndexSet out;
  out.reserve(static_cast<std::size_t>(n) - subset.size());
  for (Index i = 0; i < n; ++i) {
    if (!in[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

Matrix submatrix(const Matrix& m, const IndexSet& rows, const IndexSet& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) = m(rows[i], cols[j]);
    }
  }
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw StructuralError("max_abs_diff: dimension mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace dynkin
