#include "dynkin/field.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "dynkin/rng.hpp"

namespace dynkin {

FieldFactor factor(const CovarianceMatrix& sigma) {
  const Matrix& m = sigma.sigma;
  if (m.rows() != m.cols()) throw StructuralError("factor: covariance must be square");
  if (m.rows() > 0 && max_abs_diff(m, m.transpose()) > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    throw StructuralError("factor: covariance must be symmetric");
  }
  return FieldFactor{CholeskyFactor(m).lower()};
}

Matrix sample_field(const FieldFactor& fac, std::uint64_t seed, std::size_t n_samples) {
  const Index n = fac.dim();
  Matrix samples(static_cast<Index>(n_samples), n);
  Vector eps(n);
  for (std::size_t i = 0; i < n_samples; ++i) {
    RngStream rng = RngStream::make(seed, /*domain=*/2, i);
    for (Index u = 0; u < n; ++u) eps(u) = rng.normal();
    samples.row(static_cast<Index>(i)) = (fac.lower.triangularView<Eigen::Lower>() * eps).transpose();
  }
  return samples;
}

PredictionResult predict_direct(const GeneratorMatrix& q, const SignMatrix& s, const IndexSet& a_set,
                                Index b) {
  if (a_set.empty()) throw StructuralError("predict_direct: observed set must be non-empty");
  checked_index_set(a_set, q.size(), "predict_direct");
  for (Index a : a_set) {
    if (a == b) throw StructuralError("predict_direct: target state is in the observed set");
  }
  if (b < 0 || b >= q.size()) throw StructuralError("predict_direct: target state out of range");
  require_valid(q);

  const Matrix m = signed_precision(q, s);
  const IndexSet others = complement_of(a_set, q.size());

  const Matrix m_bb = submatrix(m, others, others);
  const Matrix m_ba = submatrix(m, others, a_set);
  const CholeskyFactor chol(m_bb);

  PredictionResult out;
  out.target = b;
  out.given = a_set;
  out.others = others;
  const Matrix solved = chol.solve(m_ba);  // (M_BB)^{-1} M_BA
  const auto b_pos = static_cast<Index>(
      std::distance(others.begin(), std::find(others.begin(), others.end(), b)));
  out.coefficients = -solved.row(b_pos).transpose();
  out.cond_cov = chol.inverse();
  return out;
}

double gaussian_lhs_analytic(const GeneratorMatrix& q, const SignMatrix& s, const Vector& d, Index x,
                             Index y) {
  const Index n = q.size();
  if (d.size() != n) throw StructuralError("gaussian_lhs_analytic: weight vector length mismatch");
  if ((d.array() < 0.0).any()) throw StructuralError("gaussian_lhs_analytic: weights must be nonnegative");
  if (x < 0 || x >= n || y < 0 || y >= n) throw StructuralError("gaussian_lhs_analytic: state out of range");
  require_valid(q);

  const Matrix m0 = signed_precision(q, s);
  Matrix m1 = m0;
  m1.diagonal() += d;

  const double log_det0 = CholeskyFactor(m0).log_det();
  const double log_det1 = CholeskyFactor(m1).log_det();
  const Matrix inv1 = spd_inverse(m1);
  return std::exp(0.5 * (log_det0 - log_det1)) * inv1(x, y);
}

namespace {

bool separates(const Matrix& q, const IndexSet& set_a, const IndexSet& set_b, const IndexSet& set_c) {
  const Index n = q.rows();
  std::vector<char> blocked(static_cast<std::size_t>(n), 0);
  for (Index v : set_b) blocked[static_cast<std::size_t>(v)] = 1;
  std::vector<char> target(static_cast<std::size_t>(n), 0);
  for (Index v : set_c) target[static_cast<std::size_t>(v)] = 1;

  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::deque<Index> frontier;
  for (Index v : set_a) {
    seen[static_cast<std::size_t>(v)] = 1;
    frontier.push_back(v);
  }
  while (!frontier.empty()) {
    const Index u = frontier.front();
    frontier.pop_front();
    if (target[static_cast<std::size_t>(u)]) return false;
    for (Index w = 0; w < n; ++w) {
      if (w == u || seen[static_cast<std::size_t>(w)] || blocked[static_cast<std::size_t>(w)]) continue;
      if (q(u, w) > 0.0) {
        seen[static_cast<std::size_t>(w)] = 1;
        frontier.push_back(w);
      }
    }
  }
  return true;
}

}  // namespace

SeparationReport cond_independence_check(const GeneratorMatrix& q, const SignMatrix& s,
                                         const IndexSet& set_a, const IndexSet& set_b,
                                         const IndexSet& set_c) {
  const Index n = q.size();
  checked_index_set(set_a, n, "cond_independence_check A");
  checked_index_set(set_b, n, "cond_independence_check B");
  checked_index_set(set_c, n, "cond_independence_check C");
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (const IndexSet* set : {&set_a, &set_b, &set_c}) {
    for (Index v : *set) {
      if (used[static_cast<std::size_t>(v)]) {
        throw StructuralError("cond_independence_check: sets must be disjoint");
      }
      used[static_cast<std::size_t>(v)] = 1;
    }
  }
  require_valid(q);

  SeparationReport report;
  report.separated = separates(q.q, set_a, set_b, set_c);

  // Conditional covariance of everything outside B, in the precision domain.
  const Matrix m = signed_precision(q, s);
  const IndexSet rest = complement_of(set_b, n);
  const Matrix cond = spd_inverse(submatrix(m, rest, rest));

  std::vector<Index> pos(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < rest.size(); ++i) pos[static_cast<std::size_t>(rest[i])] = static_cast<Index>(i);
  double max_abs = 0.0;
  for (Index a : set_a) {
    for (Index c : set_c) {
      max_abs = std::max(max_abs, std::abs(cond(pos[static_cast<std::size_t>(a)],
                                                pos[static_cast<std::size_t>(c)])));
    }
  }
  report.max_cross_abs = max_abs;
  report.zero_block_ok = max_abs <= 1e-10;
  return report;
}

}  // namespace dynkin
