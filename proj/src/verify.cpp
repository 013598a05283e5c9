#include "dynkin/verify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dynkin/field.hpp"

namespace dynkin {

Suite parse_suite(std::string_view name) {
  if (name == "occupation") return Suite::Occupation;
  if (name == "hitting") return Suite::Hitting;
  if (name == "isomorphism") return Suite::Isomorphism;
  if (name == "cond-independence") return Suite::CondIndependence;
  if (name == "claim41") return Suite::Claim41;
  throw StructuralError("unknown suite '" + std::string(name) +
                        "' (expected occupation|hitting|isomorphism|cond-independence|claim41)");
}

const char* to_string(Suite suite) {
  switch (suite) {
    case Suite::Occupation: return "occupation";
    case Suite::Hitting: return "hitting";
    case Suite::Isomorphism: return "isomorphism";
    case Suite::CondIndependence: return "cond-independence";
    case Suite::Claim41: return "claim41";
  }
  return "?";
}

namespace {

constexpr double kDeterministicTol = 1e-10;

std::vector<CheckRow> occupation_suite(const GeneratorMatrix& q, const SignMatrix& s, const McConfig& cfg) {
  const Matrix unsigned_ref = expected_occupation(q);
  const Matrix signed_ref = covariance_direct(q, s).sigma;
  const auto [occ, net] = mc_occupation_matrix(q, s, cfg);

  std::vector<CheckRow> rows;
  const Index n = q.size();
  for (Index x = 0; x < n; ++x) {
    for (Index y = 0; y < n; ++y) {
      const auto& o = occ[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
      rows.push_back(mc_row("occupation", q.label(x), q.label(y), o.mean, o.std_error, o.n,
                            unsigned_ref(x, y)));
    }
  }
  for (Index x = 0; x < n; ++x) {
    for (Index y = 0; y < n; ++y) {
      const auto& o = net[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
      rows.push_back(mc_row("net_occupation", q.label(x), q.label(y), o.mean, o.std_error, o.n,
                            signed_ref(x, y)));
    }
  }
  return rows;
}

std::vector<CheckRow> hitting_suite(const GeneratorMatrix& q, const SignMatrix& s, const McConfig& cfg,
                                    Index b, const IndexSet& a_set) {
  const PredictionResult pred = predict_direct(q, s, a_set, b);
  std::vector<CheckRow> rows;

  const auto coefs = mc_hitting_coefficients(q, s, b, a_set, cfg);
  for (std::size_t j = 0; j < a_set.size(); ++j) {
    rows.push_back(mc_row("hit_coefficient", q.label(b), q.label(a_set[j]), coefs[j].mean,
                          coefs[j].std_error, coefs[j].n, pred.coefficients(static_cast<Index>(j))));
  }

  for (std::size_t j = 0; j < pred.others.size(); ++j) {
    const Index b2 = pred.others[j];
    const McEstimate est = mc_conditional_cov(q, s, b, b2, a_set, cfg);
    const auto b_pos = static_cast<Index>(std::distance(
        pred.others.begin(), std::find(pred.others.begin(), pred.others.end(), b)));
    rows.push_back(mc_row("conditional_cov", q.label(b), q.label(b2), est.mean, est.std_error, est.n,
                          pred.cond_cov(b_pos, static_cast<Index>(j))));
  }
  return rows;
}

std::vector<CheckRow> isomorphism_suite(const GeneratorMatrix& q, const SignMatrix& s, const McConfig& cfg,
                                        Index x, Index y, const Vector& d) {
  std::vector<CheckRow> rows;
  const IsomorphismCheck check = mc_isomorphism_check(q, s, x, y, d, cfg);
  rows.push_back(mc_row("gaussian_lhs", q.label(x), q.label(y), check.lhs.mean, check.lhs.std_error,
                        check.lhs.n, check.analytic));
  rows.push_back(mc_row("path_rhs", q.label(x), q.label(y), check.rhs.mean, check.rhs.std_error,
                        check.rhs.n, check.analytic));
  // Both estimators against each other with pooled uncertainty.
  const double pooled =
      std::sqrt(check.lhs.std_error * check.lhs.std_error + check.rhs.std_error * check.rhs.std_error);
  rows.push_back(mc_row("isomorphism_bridge", q.label(x), q.label(y), check.lhs.mean, pooled, check.lhs.n,
                        check.rhs.mean));

  // Occupation-moment identity alone: the path side without the field factor.
  Matrix shifted_q = q.q;
  shifted_q.diagonal() -= d;
  const GeneratorMatrix shifted{q.states, shifted_q};
  const Matrix ref = spd_inverse(signed_precision(shifted, s));
  const McEstimate mu = mc_mu_integral(
      q, s, x, y,
      [&](const std::vector<double>& occ, int sign_at_death) {
        double weighted = 0.0;
        for (std::size_t u = 0; u < occ.size(); ++u) weighted += d(static_cast<Index>(u)) * occ[u];
        return std::exp(-weighted) * sign_at_death;
      },
      cfg);
  rows.push_back(mc_row("occupation_moment", q.label(x), q.label(y), mu.mean, mu.std_error, mu.n, ref(x, y)));
  return rows;
}

std::vector<CheckRow> cond_independence_suite(const GeneratorMatrix& q, const SignMatrix& s,
                                              const SuiteOptions& opts) {
  const SeparationReport report = cond_independence_check(q, s, opts.set_a, opts.set_b, opts.set_c);
  std::vector<CheckRow> rows;
  rows.push_back(deterministic_row("graph_separation", "", "", report.separated ? 1.0 : 0.0, 1.0, 0.5));
  if (report.separated) {
    rows.push_back(
        deterministic_row("conditional_cross_block", "", "", report.max_cross_abs, 0.0, kDeterministicTol));
  }
  return rows;
}

std::vector<CheckRow> claim41_suite(const GeneratorMatrix& q, const SignMatrix& s, Index b,
                                    const IndexSet& a_set) {
  // The restriction is tested for A = a_set plus the target, matching what a
  // prediction on that set would eliminate.
  IndexSet keep = a_set;
  if (b >= 0 && std::find(keep.begin(), keep.end(), b) == keep.end()) keep.push_back(b);
  std::sort(keep.begin(), keep.end());

  const Matrix m = signed_precision(q, s);
  const Matrix restricted = schur_restrict(m, keep);
  const Matrix sigma = covariance_direct(q, s).sigma;

  std::vector<CheckRow> rows;
  // Inverse of the restriction vs the covariance block.
  rows.push_back(deterministic_row("restriction_inverse", "", "",
                                   max_abs_diff(spd_inverse(restricted), submatrix(sigma, keep, keep)),
                                   0.0, kDeterministicTol));

  // Restriction entries vs the first-step route:
  //   hit(a, a') = p(a,a') s(a,a') + sum_{mid notin keep} p(a,mid) s(a,mid) coef_mid(a'),
  // with coef_mid the hitting coefficients from outside the kept set.
  const IndexSet outside = complement_of(keep, q.size());
  const EmbeddedChain chain = embedded_chain(q);
  Matrix hit(static_cast<Index>(keep.size()), static_cast<Index>(keep.size()));
  Matrix coef_outside(0, 0);
  if (!outside.empty()) {
    const Matrix m_bb = submatrix(m, outside, outside);
    const Matrix m_ba = submatrix(m, outside, keep);
    coef_outside = -CholeskyFactor(m_bb).solve(m_ba);  // rows: outside, cols: keep
  }
  for (std::size_t ia = 0; ia < keep.size(); ++ia) {
    const Index a = keep[ia];
    for (std::size_t ja = 0; ja < keep.size(); ++ja) {
      const Index a2 = keep[ja];
      double v = chain.p(a, a2) * s.s(a, a2);
      for (std::size_t ob = 0; ob < outside.size(); ++ob) {
        const Index mid = outside[ob];
        if (chain.p(a, mid) != 0.0) {
          v += chain.p(a, mid) * s.s(a, mid) * coef_outside(static_cast<Index>(ob), static_cast<Index>(ja));
        }
      }
      hit(static_cast<Index>(ia), static_cast<Index>(ja)) = v;
    }
  }
  Matrix from_hits(static_cast<Index>(keep.size()), static_cast<Index>(keep.size()));
  for (std::size_t ia = 0; ia < keep.size(); ++ia) {
    const double rate = chain.rates(keep[ia]);
    for (std::size_t ja = 0; ja < keep.size(); ++ja) {
      const double h = hit(static_cast<Index>(ia), static_cast<Index>(ja));
      from_hits(static_cast<Index>(ia), static_cast<Index>(ja)) =
          (ia == ja) ? rate * (1.0 - h) : -rate * h;
    }
  }
  rows.push_back(deterministic_row("restriction_first_step", "", "", max_abs_diff(restricted, from_hits),
                                   0.0, kDeterministicTol));
  return rows;
}

}  // namespace

std::vector<CheckRow> run_suite(Suite suite, const GeneratorMatrix& q, const SignMatrix& s,
                                const McConfig& cfg, const SuiteOptions& opts) {
  require_valid(q);
  require_sign_matrix(s, q.size());
  const Index n = q.size();

  switch (suite) {
    case Suite::Occupation:
      return occupation_suite(q, s, cfg);
    case Suite::Hitting: {
      Index b = opts.target >= 0 ? opts.target : 0;
      IndexSet a_set = opts.given;
      if (a_set.empty()) {
        for (Index i = 0; i < n; ++i) {
          if (i != b) a_set.push_back(i);
        }
      }
      if (a_set.empty()) throw StructuralError("hitting suite needs at least two states");
      return hitting_suite(q, s, cfg, b, a_set);
    }
    case Suite::Isomorphism: {
      const Index x = opts.x >= 0 ? opts.x : 0;
      const Index y = opts.y >= 0 ? opts.y : n - 1;
      Vector d = opts.d;
      if (d.size() == 0) d = Vector::Zero(n);
      return isomorphism_suite(q, s, cfg, x, y, d);
    }
    case Suite::CondIndependence: {
      if (opts.set_a.empty() || opts.set_b.empty() || opts.set_c.empty()) {
        throw StructuralError("cond-independence suite needs --set-a, --set-b and --set-c");
      }
      return cond_independence_suite(q, s, opts);
    }
    case Suite::Claim41: {
      Index b = opts.target >= 0 ? opts.target : 0;
      IndexSet a_set = opts.given;
      if (a_set.empty()) {
        // Default: keep roughly half the states.
        for (Index i = 0; i < n; i += 2) {
          if (i != b) a_set.push_back(i);
        }
        if (a_set.empty() && n > 1) a_set.push_back(1);
      }
      return claim41_suite(q, s, b, a_set);
    }
  }
  throw StructuralError("unhandled suite");
}

}  // namespace dynkin
