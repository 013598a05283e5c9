#include "dynkin/ou.hpp"

#include <cmath>
#include <string>

namespace dynkin {

namespace detail {

Scaled scaled_normalize(double mantissa, long exponent) {
  if (mantissa == 0.0) return Scaled{0.0, 0};
  int shift = 0;
  const double m = std::frexp(mantissa, &shift);
  return Scaled{m, exponent + shift};
}

Scaled Scaled::from(double v) { return scaled_normalize(v, 0); }

double Scaled::to_double() const { return std::ldexp(mantissa, static_cast<int>(exponent)); }

Scaled scaled_mul(const Scaled& a, const Scaled& b) {
  return scaled_normalize(a.mantissa * b.mantissa, a.exponent + b.exponent);
}

Scaled scaled_div(const Scaled& a, const Scaled& b) {
  return scaled_normalize(a.mantissa / b.mantissa, a.exponent - b.exponent);
}

Scaled scaled_sub(const Scaled& a, const Scaled& b) {
  if (a.mantissa == 0.0) return scaled_normalize(-b.mantissa, b.exponent);
  if (b.mantissa == 0.0) return a;
  // Align b onto a's exponent; a distant exponent just underflows the term.
  const double shifted = std::ldexp(b.mantissa, static_cast<int>(b.exponent - a.exponent));
  return scaled_normalize(a.mantissa - shifted, a.exponent);
}

Scaled scaled_step(double a, const Scaled& b, double c, const Scaled& d) {
  return scaled_sub(scaled_mul(Scaled::from(a), b), scaled_mul(Scaled::from(c), d));
}

}  // namespace detail

CovarianceMatrix ou_covariance(const OuSpec& spec) {
  if (spec.n < 1) throw StructuralError("ou_covariance: n must be at least 1");
  const Index n = spec.n;
  const double a = spec.a;

  // var_k = sum_{j=0..k-1} a^{2j}; Sigma(k,l) = var_k * a^{l-k} for k <= l.
  Vector var(n);
  double running = 0.0;
  double a2j = 1.0;
  for (Index k = 0; k < n; ++k) {
    running += a2j;
    a2j *= a * a;
    var(k) = running;
  }

  Matrix sigma(n, n);
  for (Index k = 0; k < n; ++k) {
    double scale = 1.0;
    for (Index l = k; l < n; ++l) {
      sigma(k, l) = sigma(l, k) = var(k) * scale;
      scale *= a;
    }
  }
  return CovarianceMatrix{sigma};
}

GeneratorMatrix ou_generator(const OuSpec& spec, OuBoundary boundary, bool gaussian_only) {
  if (spec.n < 1) throw StructuralError("ou_generator: n must be at least 1");
  if (!(spec.a > 0.0) && !gaussian_only) {
    throw StructuralError("ou_generator: a must be positive for the chain interpretation");
  }
  const Index n = spec.n;
  GeneratorMatrix gen;
  gen.states.reserve(static_cast<std::size_t>(n));
  for (Index i = 1; i <= n; ++i) gen.states.push_back(std::to_string(i));
  gen.q = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    gen.q(i, i) = -(1.0 + spec.a * spec.a);
    if (i + 1 < n) gen.q(i, i + 1) = gen.q(i + 1, i) = spec.a;
  }
  if (boundary == OuBoundary::Corrected) gen.q(n - 1, n - 1) = -1.0;
  return gen;
}

CovarianceMatrix signed_ou_covariance(const OuSpec& spec, const SignMatrix& s) {
  if (spec.n < 1) throw StructuralError("signed_ou_covariance: n must be at least 1");
  require_sign_matrix(s, spec.n);
  const Index n = spec.n;
  const double a = spec.a;

  Vector var(n);
  double running = 0.0;
  double a2j = 1.0;
  for (Index k = 0; k < n; ++k) {
    running += a2j;
    a2j *= a * a;
    var(k) = running;
  }

  Matrix sigma(n, n);
  for (Index k = 0; k < n; ++k) {
    double scale = 1.0;
    sigma(k, k) = var(k);
    for (Index l = k + 1; l < n; ++l) {
      scale *= a * s.s(l - 1, l);
      sigma(k, l) = sigma(l, k) = var(k) * scale;
    }
  }
  return CovarianceMatrix{sigma};
}

namespace {

using detail::Scaled;

void validate_noisy_spec(const NoisyObsSpec& spec) {
  if (spec.obs_points.empty()) throw StructuralError("noisy_prediction: need at least one observation");
  if (!(spec.sigma2 > 0.0)) throw StructuralError("noisy_prediction: sigma2 must be positive");
  Index prev = 0;
  for (Index p : spec.obs_points) {
    if (p <= prev) throw StructuralError("noisy_prediction: observation points must be strictly increasing naturals");
    prev = p;
  }
  if (!spec.values.empty() && spec.values.size() != spec.obs_points.size()) {
    throw StructuralError("noisy_prediction: values must be empty or one per observation point");
  }
}

}  // namespace

NoisyPrediction noisy_prediction(const NoisyObsSpec& spec, Index n_query) {
  validate_noisy_spec(spec);
  if (n_query < 1) throw StructuralError("noisy_prediction: query point must be a natural number");
  const auto k = static_cast<Index>(spec.obs_points.size());
  const double s2 = spec.sigma2;

  NoisyPrediction out;

  // Gram matrix of the a=1 process on the observation points, plus noise.
  Matrix gram(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      gram(i, j) = static_cast<double>(std::min(spec.obs_points[static_cast<std::size_t>(i)],
                                                spec.obs_points[static_cast<std::size_t>(j)]));
    }
  }
  Matrix noisy = gram;
  noisy.diagonal().array() += s2;

  Vector cov_query(k);
  for (Index i = 0; i < k; ++i) {
    cov_query(i) = static_cast<double>(std::min(n_query, spec.obs_points[static_cast<std::size_t>(i)]));
  }

  // Route (i): dense factorization.
  out.weights_direct = CholeskyFactor(noisy).solve(Matrix(cov_query)).col(0);

  // Two tridiagonals share the stage. The actual factor core of
  // noisy = U Lambda U^T (U the all-ones lower triangle) has diagonal
  // gap_1 + s2, then gap_i + 2 s2, because U^{-1} U^{-T} has diagonal
  // (1, 2, ..., 2). The i*s2-diagonal variant coincides with it only up
  // to k = 2. The core drives the weight computation; the variant feeds
  // the one-sequence comparison route.
  out.lambda = Matrix::Zero(k, k);
  out.lambda_core = Matrix::Zero(k, k);
  for (Index i = 0; i < k; ++i) {
    const Index gap = spec.obs_points[static_cast<std::size_t>(i)] -
                      (i > 0 ? spec.obs_points[static_cast<std::size_t>(i - 1)] : 0);
    out.lambda(i, i) = static_cast<double>(gap) + static_cast<double>(i + 1) * s2;
    out.lambda_core(i, i) = static_cast<double>(gap) + (i == 0 ? 1.0 : 2.0) * s2;
    if (i + 1 < k) {
      out.lambda(i, i + 1) = out.lambda(i + 1, i) = -s2;
      out.lambda_core(i, i + 1) = out.lambda_core(i + 1, i) = -s2;
    }
  }

  // Symmetric-tridiagonal inverse by the two-sided principal-minor
  // recurrences: theta_i = d_i theta_{i-1} - s2^2 theta_{i-2}, phi from the
  // other end; inv(i,j) = s2^{j-i} theta_{i-1} phi_{j+1} / theta_k for i <= j.
  const auto two_sided_inverse = [&](const Matrix& tri, double* det_out) {
    std::vector<Scaled> theta(static_cast<std::size_t>(k) + 1);
    theta[0] = Scaled::from(1.0);
    theta[1] = Scaled::from(tri(0, 0));
    for (Index i = 2; i <= k; ++i) {
      theta[static_cast<std::size_t>(i)] =
          detail::scaled_step(tri(i - 1, i - 1), theta[static_cast<std::size_t>(i - 1)], s2 * s2,
                              theta[static_cast<std::size_t>(i - 2)]);
    }
    std::vector<Scaled> phi(static_cast<std::size_t>(k) + 2);
    phi[static_cast<std::size_t>(k) + 1] = Scaled::from(1.0);
    phi[static_cast<std::size_t>(k)] = Scaled::from(tri(k - 1, k - 1));
    for (Index j = k - 1; j >= 1; --j) {
      phi[static_cast<std::size_t>(j)] =
          detail::scaled_step(tri(j - 1, j - 1), phi[static_cast<std::size_t>(j + 1)], s2 * s2,
                              phi[static_cast<std::size_t>(j + 2)]);
    }
    if (det_out != nullptr) *det_out = theta[static_cast<std::size_t>(k)].to_double();

    Matrix inv(k, k);
    for (Index i = 0; i < k; ++i) {
      for (Index j = i; j < k; ++j) {
        const Scaled v = detail::scaled_div(
            detail::scaled_mul(theta[static_cast<std::size_t>(i)], phi[static_cast<std::size_t>(j) + 2]),
            theta[static_cast<std::size_t>(k)]);
        const double entry = v.to_double() * std::pow(s2, static_cast<double>(j - i));
        inv(i, j) = inv(j, i) = entry;
      }
    }
    return inv;
  };

  out.lambda_inv_recurrence = two_sided_inverse(out.lambda, &out.det_lambda);
  const Matrix core_inv = two_sided_inverse(out.lambda_core, nullptr);

  // One-sequence route, taken at face value.
  std::vector<Scaled> r(static_cast<std::size_t>(k) + 1);
  r[0] = Scaled::from(s2);
  if (k >= 1) {
    r[1] = Scaled::from((static_cast<double>(spec.obs_points[0]) + s2) * s2);
  }
  for (Index i = 2; i <= k; ++i) {
    r[static_cast<std::size_t>(i)] = detail::scaled_step(
        out.lambda(i - 1, i - 1), r[static_cast<std::size_t>(i - 1)], 1.0, r[static_cast<std::size_t>(i - 2)]);
  }
  out.r.resize(static_cast<std::size_t>(k) + 1);
  for (std::size_t i = 0; i < out.r.size(); ++i) out.r[i] = r[i].to_double();

  out.lambda_inv_single_seq = Matrix(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = i; j < k; ++j) {
      const Scaled v = detail::scaled_div(
          detail::scaled_mul(r[static_cast<std::size_t>(i)], r[static_cast<std::size_t>(k - j - 1)]),
          r[static_cast<std::size_t>(k)]);
      out.lambda_inv_single_seq(i, j) = out.lambda_inv_single_seq(j, i) = v.to_double();
    }
  }

  // gamma weights from the printed closed form; r_{-1} := 0 at the boundary.
  auto r_at = [&](Index i) -> Scaled { return i < 0 ? Scaled{0.0, 0} : r[static_cast<std::size_t>(i)]; };
  Matrix gamma(k, k);
  for (Index i1 = 1; i1 <= k; ++i1) {
    for (Index j1 = i1; j1 <= k; ++j1) {
      Scaled num;
      if (i1 < j1) {
        num = detail::scaled_mul(detail::scaled_sub(r_at(i1), r_at(i1 - 1)),
                                 detail::scaled_sub(r_at(k - j1), r_at(k - j1 - 1)));
      } else {
        const Scaled two_r = detail::scaled_normalize(2.0 * r_at(k - i1 - 1).mantissa,
                                                      r_at(k - i1 - 1).exponent);
        num = detail::scaled_sub(detail::scaled_mul(r_at(i1 - 1), detail::scaled_sub(r_at(k - i1), two_r)),
                                 detail::scaled_normalize(-r_at(i1).mantissa * r_at(k - i1 - 1).mantissa,
                                                          r_at(i1).exponent + r_at(k - i1 - 1).exponent));
      }
      const double v = detail::scaled_div(num, r[static_cast<std::size_t>(k)]).to_double();
      gamma(i1 - 1, j1 - 1) = gamma(j1 - 1, i1 - 1) = v;
    }
  }
  out.weights_single_seq = gamma * cov_query;

  // Route (ii) weights: conjugate the core inverse by the first difference
  // operator (the exact inverse of the all-ones lower triangle).
  Matrix diff = Matrix::Zero(k, k);
  for (Index i = 0; i < k; ++i) {
    diff(i, i) = 1.0;
    if (i > 0) diff(i, i - 1) = -1.0;
  }
  const Matrix noisy_inv_rec = diff.transpose() * core_inv * diff;
  out.weights_recurrence = noisy_inv_rec * cov_query;

  out.max_diff_recurrence = (out.weights_recurrence - out.weights_direct).cwiseAbs().maxCoeff();
  out.max_diff_single_seq = (out.weights_single_seq - out.weights_direct).cwiseAbs().maxCoeff();

  if (!spec.values.empty()) {
    out.has_values = true;
    Vector vals(k);
    for (Index i = 0; i < k; ++i) vals(i) = spec.values[static_cast<std::size_t>(i)];
    out.predicted_direct = out.weights_direct.dot(vals);
    out.predicted_recurrence = out.weights_recurrence.dot(vals);
    out.predicted_single_seq = out.weights_single_seq.dot(vals);
  }
  return out;
}

}  // namespace dynkin
