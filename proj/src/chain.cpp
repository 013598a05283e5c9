#include "dynkin/chain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace dynkin {

namespace {

bool support_connected(const Matrix& q) {
  const Index n = q.rows();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::deque<Index> frontier{0};
  seen[0] = 1;
  Index reached = 1;
  while (!frontier.empty()) {
    Index x = frontier.front();
    frontier.pop_front();
    for (Index y = 0; y < n; ++y) {
      if (y == x || seen[static_cast<std::size_t>(y)]) continue;
      if (q(x, y) > 0.0) {
        seen[static_cast<std::size_t>(y)] = 1;
        ++reached;
        frontier.push_back(y);
      }
    }
  }
  return reached == n;
}

}  // namespace

const char* to_string(TransienceMode mode) {
  switch (mode) {
    case TransienceMode::T1: return "T1";
    case TransienceMode::T2: return "T2";
    case TransienceMode::Both: return "both";
    case TransienceMode::Neither: return "neither";
  }
  return "?";
}

Index GeneratorMatrix::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == label) return static_cast<Index>(i);
  }
  throw StructuralError("unknown state label '" + label + "'");
}

ValidationReport validate_generator(const GeneratorMatrix& gen) {
  const Matrix& q = gen.q;
  if (q.rows() == 0 || q.rows() != q.cols()) {
    throw StructuralError("generator matrix must be square and non-empty");
  }
  if (!gen.states.empty() && static_cast<Index>(gen.states.size()) != q.rows()) {
    throw StructuralError("state label count does not match matrix dimension");
  }
  const Index n = q.rows();

  ValidationReport report;
  report.symmetric_ok = true;
  report.sign_pattern_ok = true;
  report.row_sums_ok = true;

  for (Index x = 0; x < n; ++x) {
    if (!(q(x, x) < 0.0)) report.sign_pattern_ok = false;
    for (Index y = x + 1; y < n; ++y) {
      if (std::abs(q(x, y) - q(y, x)) > kValidationTol) report.symmetric_ok = false;
      if (q(x, y) < 0.0 || q(y, x) < 0.0) report.sign_pattern_ok = false;
    }
  }

  bool any_strict = false;
  bool all_strict = true;
  for (Index x = 0; x < n; ++x) {
    const double row_sum = q.row(x).sum();
    if (row_sum > kValidationTol) report.row_sums_ok = false;
    const bool strict = row_sum < -kValidationTol;
    any_strict = any_strict || strict;
    all_strict = all_strict && strict;
  }

  report.irreducible = support_connected(q);
  const bool cond1 = report.irreducible && any_strict;
  const bool cond2 = all_strict;
  if (cond1 && cond2) {
    report.transience_mode = TransienceMode::Both;
  } else if (cond1) {
    report.transience_mode = TransienceMode::T1;
  } else if (cond2) {
    report.transience_mode = TransienceMode::T2;
  } else {
    report.transience_mode = TransienceMode::Neither;
  }
  return report;
}

void require_valid(const GeneratorMatrix& q) {
  const ValidationReport report = validate_generator(q);
  if (!report.valid()) {
    std::string msg = "generator rejected:";
    if (!report.symmetric_ok) msg += " not symmetric;";
    if (!report.sign_pattern_ok) msg += " sign pattern violated (need q(x,y)>=0 off-diagonal, q(x,x)<0);";
    if (!report.row_sums_ok) msg += " some row sum is positive;";
    if (report.transience_mode == TransienceMode::Neither) msg += " not transient (conservative generator);";
    throw ValidationError(msg);
  }
}

void require_sign_matrix(const SignMatrix& sign, Index n) {
  const Matrix& s = sign.s;
  if (s.rows() != n || s.cols() != n) {
    throw StructuralError("sign matrix dimension mismatch");
  }
  for (Index x = 0; x < n; ++x) {
    if (s(x, x) != 1.0) throw StructuralError("sign matrix diagonal must be +1");
    for (Index y = x + 1; y < n; ++y) {
      if (s(x, y) != s(y, x)) throw StructuralError("sign matrix must be symmetric");
      if (s(x, y) != 1.0 && s(x, y) != -1.0) {
        throw StructuralError("sign matrix entries must be +1 or -1");
      }
    }
  }
}

EmbeddedChain embedded_chain(const GeneratorMatrix& gen) {
  require_valid(gen);
  const Index n = gen.size();
  EmbeddedChain chain;
  chain.p = Matrix::Zero(n, n);
  chain.kill = Vector::Zero(n);
  chain.rates = Vector::Zero(n);
  for (Index x = 0; x < n; ++x) {
    chain.rates(x) = -gen.q(x, x);
    for (Index y = 0; y < n; ++y) {
      if (y != x) chain.p(x, y) = -gen.q(x, y) / gen.q(x, x);
    }
    chain.kill(x) = std::max(0.0, 1.0 - chain.p.row(x).sum());
  }
  return chain;
}

Matrix signed_precision(const GeneratorMatrix& gen, const SignMatrix& sign) {
  if (gen.q.rows() != gen.q.cols()) throw StructuralError("generator matrix must be square");
  require_sign_matrix(sign, gen.q.rows());
  return -(gen.q.cwiseProduct(sign.s));
}

CovarianceMatrix covariance_direct(const GeneratorMatrix& gen, const SignMatrix& sign) {
  require_valid(gen);
  const Matrix m = signed_precision(gen, sign);
  return CovarianceMatrix{spd_inverse(m)};
}

Matrix neumann_inverse(const EmbeddedChain& chain, const SignMatrix& sign, double tol, int max_terms) {
  const Index n = chain.p.rows();
  require_sign_matrix(sign, n);
  if (!(tol > 0.0)) throw StructuralError("neumann tolerance must be positive");
  if (max_terms < 1) throw StructuralError("max_terms must be at least 1");

  const Matrix t = chain.p.cwiseProduct(sign.s);
  Matrix partial = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= max_terms; ++k) {
    term = term * t;
    partial += term;
    const double term_norm = term.cwiseAbs().maxCoeff();
    const double sum_norm = partial.cwiseAbs().maxCoeff();
    if (term_norm <= tol * sum_norm) {
      return partial * chain.rates.cwiseInverse().asDiagonal();
    }
  }
  throw ConvergenceError("jump-chain series did not reach tolerance in " + std::to_string(max_terms) +
                         " terms (chain close to recurrent?)");
}

CovarianceMatrix covariance_neumann(const GeneratorMatrix& gen, const SignMatrix& sign, double tol,
                                    int max_terms) {
  require_valid(gen);
  return CovarianceMatrix{neumann_inverse(embedded_chain(gen), sign, tol, max_terms)};
}

Matrix schur_restrict(const Matrix& m, const IndexSet& keep) {
  if (m.rows() != m.cols()) throw StructuralError("schur_restrict: matrix must be square");
  if (keep.empty()) throw StructuralError("schur_restrict: kept index set must be non-empty");
  checked_index_set(keep, m.rows(), "schur_restrict");
  const IndexSet drop = complement_of(keep, m.rows());
  if (drop.empty()) return m;

  const Matrix m_aa = submatrix(m, keep, keep);
  const Matrix m_ab = submatrix(m, keep, drop);
  const Matrix m_bb = submatrix(m, drop, drop);
  const Matrix result = m_aa - m_ab * CholeskyFactor(m_bb).solve(Matrix(m_ab.transpose()));
  return 0.5 * (result + result.transpose());
}

Matrix expected_occupation(const GeneratorMatrix& gen) {
  return covariance_direct(gen, SignMatrix::all_positive(gen.size())).sigma;
}

PrecisionSplit split_signed_precision(const Matrix& m) {
  if (m.rows() != m.cols()) throw StructuralError("split_signed_precision: matrix must be square");
  const Index n = m.rows();
  PrecisionSplit out;
  out.q = Matrix::Zero(n, n);
  out.s = Matrix::Ones(n, n);
  for (Index x = 0; x < n; ++x) {
    out.q(x, x) = -m(x, x);
    for (Index y = x + 1; y < n; ++y) {
      const double v = m(x, y);
      out.q(x, y) = out.q(y, x) = std::abs(v);
      if (v == 0.0) {
        out.indeterminate.emplace_back(x, y);
      } else {
        out.s(x, y) = out.s(y, x) = (v < 0.0) ? 1.0 : -1.0;
      }
    }
  }
  return out;
}

}  // namespace dynkin
