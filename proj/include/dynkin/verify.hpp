#pragma once

#include <string_view>
#include <vector>

#include "dynkin/chain.hpp"
#include "dynkin/estimators.hpp"
#include "dynkin/report.hpp"

namespace dynkin {

enum class Suite { Occupation, Hitting, Isomorphism, CondIndependence, Claim41 };

Suite parse_suite(std::string_view name);
const char* to_string(Suite suite);

/// Per-suite parameters; unset indices default inside each suite.
struct SuiteOptions {
  Index target = -1;       // hitting / claim41: predicted state b
  IndexSet given;          // hitting / claim41: observed set A
  IndexSet set_a, set_b, set_c;  // cond-independence triple
  Index x = -1, y = -1;    // isomorphism endpoints
  Vector d;                // isomorphism weights (empty = zeros)
};

/// Runs one verification suite and returns its check rows.
///
///   occupation        - MC occupation / net-occupation matrices vs -Q^{-1}, (-Q o S)^{-1}
///   hitting           - MC hitting coefficients and truncated covariance vs the Schur route
///   isomorphism       - field MC, mixed path MC and the closed form of the moment identity
///   cond-independence - separator check plus conditional cross-covariance block
///   claim41           - restriction identities, fully deterministic (tolerance 1e-10)
std::vector<CheckRow> run_suite(Suite suite, const GeneratorMatrix& q, const SignMatrix& s,
                                const McConfig& cfg, const SuiteOptions& opts);

}  // namespace dynkin
