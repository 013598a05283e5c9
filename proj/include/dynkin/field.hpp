#pragma once

#include <cstdint>

#include "dynkin/chain.hpp"

namespace dynkin {

/// Lower-triangular factor L with Sigma = L L^T, the sampling device for the field.
struct FieldFactor {
  Matrix lower;

  Index dim() const { return lower.rows(); }
};

/// Triangular factorization of a covariance matrix; failure (with the pivot
/// index in the exception) is the positive-definiteness test.
FieldFactor factor(const CovarianceMatrix& sigma);

/// n_samples independent zero-mean draws with covariance L L^T, one per row.
/// Each draw has its own counter stream of `seed`, so results never depend on
/// how samples are batched.
Matrix sample_field(const FieldFactor& fac, std::uint64_t seed, std::size_t n_samples);

/// Conditional law of the field at `target` given the values on `given`:
/// regression coefficients (one per given state, in given order) and the full
/// conditional covariance of the unobserved block.
struct PredictionResult {
  Index target = -1;
  IndexSet given;
  IndexSet others;  // the unobserved block, ascending; indexes cond_cov
  Vector coefficients;
  Matrix cond_cov;
};

/// Precision-domain route: coefficients from -(M_BB)^{-1} M_BA and
/// conditional covariance (M_BB)^{-1}, with M = -Q o S and B the complement
/// of the observed set.
PredictionResult predict_direct(const GeneratorMatrix& q, const SignMatrix& s, const IndexSet& a_set,
                                Index b);

/// Closed form of E[Z_x Z_y exp(-sum_u d_u Z_u^2/2)]:
/// sqrt(det(-Q o S) / det((D - Q) o S)) * ((D - Q) o S)^{-1}(x, y),
/// determinants taken in log space from the triangular factors.
double gaussian_lhs_analytic(const GeneratorMatrix& q, const SignMatrix& s, const Vector& d, Index x,
                             Index y);

struct SeparationReport {
  bool separated = false;      // every support path from set_a to set_c meets set_b
  double max_cross_abs = 0.0;  // sup-norm of the (A,C) block of Cov[. | Z_B]
  bool zero_block_ok = false;  // max_cross_abs <= 1e-10
};

/// Checks graph separation of set_a from set_c by set_b on the support of Q,
/// and measures the corresponding conditional-covariance cross block.
SeparationReport cond_independence_check(const GeneratorMatrix& q, const SignMatrix& s,
                                         const IndexSet& set_a, const IndexSet& set_b,
                                         const IndexSet& set_c);

}  // namespace dynkin
