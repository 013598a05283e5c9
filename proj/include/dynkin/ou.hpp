#pragma once

#include <vector>

#include "dynkin/chain.hpp"

namespace dynkin {

/// Autoregression Z_i = a Z_{i-1} + eps_i truncated to the first n points.
struct OuSpec {
  double a = 0.5;
  Index n = 1;
};

enum class OuBoundary {
  Raw,       // tridiagonal generator exactly as on the infinite lattice
  Corrected  // last diagonal replaced so the truncation inverts to the covariance
};

/// Covariance of the autoregression: Sigma(k,l) = a^{l-k} sum_{i=1..k} a^{2(k-i)}
/// for k <= l. a = 1 gives Sigma(k,l) = min(k,l).
CovarianceMatrix ou_covariance(const OuSpec& spec);

/// Tridiagonal generator with diagonal -(1+a^2) and off-diagonal a; the
/// corrected boundary sets the last diagonal to -1, which makes -Q^{-1} equal
/// ou_covariance exactly on the truncation. Requires a > 0 for the chain
/// interpretation; pass gaussian_only to build the matrix for a <= 0 anyway.
GeneratorMatrix ou_generator(const OuSpec& spec, OuBoundary boundary, bool gaussian_only = false);

/// Covariance of the signed recursion Z'_i = s(i-1,i) a Z'_{i-1} + eps_i.
/// Only consecutive signs enter. Equals (-Q o S)^{-1} for the corrected
/// boundary generator.
CovarianceMatrix signed_ou_covariance(const OuSpec& spec, const SignMatrix& s);

/// Observations of the a=1 process (Sigma(k,l) = min(k,l)) at increasing
/// points, each with independent N(0, sigma2) noise.
struct NoisyObsSpec {
  std::vector<Index> obs_points;
  double sigma2 = 1.0;
  std::vector<double> values;  // optional, size 0 or k
};

/// Kriging weights Sigma_{nV} (Sigma_{VV} + sigma2 I)^{-1} computed three ways.
///
/// weights_direct is the dense-factorization reference. weights_recurrence
/// factors the noisy Gram matrix through the all-ones lower triangle U and
/// inverts the actual tridiagonal core U^{-1}(Sigma_{VV}+sigma2 I)U^{-T}
/// (diagonal gap_i + sigma2 for i=1 and gap_i + 2 sigma2 after that) with the
/// two-sided (forward theta, backward phi) recurrence; it must match the
/// reference. weights_single_seq takes the often-quoted shortcut: the
/// tridiagonal written with an i*sigma2 diagonal and a one-sequence
/// r-recurrence standing in for both minor sequences of its inverse
/// (r_{-1} := 0 where the formula runs off the end). That route disagrees
/// with the reference beyond two observations, so it is computed and
/// reported, never trusted.
struct NoisyPrediction {
  Vector weights_direct;
  Vector weights_recurrence;
  Vector weights_single_seq;

  Matrix lambda;                 // i*sigma2-diagonal tridiagonal, off-diag -sigma2
  Matrix lambda_core;            // actual factor core: diag n_i - n_{i-1} + min(i,2) sigma2
  Matrix lambda_inv_recurrence;  // two-sided recurrence inverse of `lambda`
  Matrix lambda_inv_single_seq;  // one-sequence inverse of `lambda`
  std::vector<double> r;         // r_0 .. r_k
  double det_lambda = 0.0;       // terminal forward value theta_k of `lambda`

  double max_diff_recurrence = 0.0;  // vs weights_direct
  double max_diff_single_seq = 0.0;       // vs weights_direct

  bool has_values = false;
  double predicted_direct = 0.0;
  double predicted_recurrence = 0.0;
  double predicted_single_seq = 0.0;
};

NoisyPrediction noisy_prediction(const NoisyObsSpec& spec, Index n_query);

namespace detail {

/// Value v represented as mantissa * 2^exponent with |mantissa| in [0.5, 1) or 0;
/// keeps geometrically growing recurrences away from overflow.
struct Scaled {
  double mantissa = 0.0;
  long exponent = 0;

  static Scaled from(double v);
  double to_double() const;
};

Scaled scaled_normalize(double mantissa, long exponent);
Scaled scaled_mul(const Scaled& a, const Scaled& b);
Scaled scaled_div(const Scaled& a, const Scaled& b);
Scaled scaled_sub(const Scaled& a, const Scaled& b);
/// a*b - c*d, the three-term recurrence step.
Scaled scaled_step(double a, const Scaled& b, double c, const Scaled& d);

}  // namespace detail

}  // namespace dynkin
