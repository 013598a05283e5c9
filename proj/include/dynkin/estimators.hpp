#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "dynkin/chain.hpp"
#include "dynkin/path.hpp"

namespace dynkin {

struct McConfig {
  std::size_t n_paths = 10000;
  std::uint64_t seed = 0;
  std::size_t max_jumps = 1000000;
  unsigned n_workers = 1;
};

/// Sample mean with plain-sample-variance standard error (std/sqrt(n)).
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

using EstimateMatrix = std::vector<std::vector<McEstimate>>;

/// Estimates of E_start[time at y] and E_start[sign-weighted time at y] for
/// every y, from cfg.n_paths paths. Stream indices depend on `start`, so the
/// row equals the corresponding row of mc_occupation_matrix bit for bit.
std::pair<std::vector<McEstimate>, std::vector<McEstimate>> mc_occupation_from(const GeneratorMatrix& q,
                                                                               const SignMatrix& s,
                                                                               Index start,
                                                                               const McConfig& cfg);

/// Per-start-state estimates of expected occupation and expected net
/// occupation times: result.first[x][y] ~ E_x[time at y],
/// result.second[x][y] ~ E_x[sign-weighted time at y].
std::pair<EstimateMatrix, EstimateMatrix> mc_occupation_matrix(const GeneratorMatrix& q,
                                                               const SignMatrix& s, const McConfig& cfg);

/// E_b[ 1{first entry into a_set lands at a} * sign at that hit ], one
/// estimate per a in a_set. Paths killed before reaching a_set contribute 0.
std::vector<McEstimate> mc_hitting_coefficients(const GeneratorMatrix& q, const SignMatrix& s, Index b,
                                                const IndexSet& a_set, const McConfig& cfg);

/// E_b[ sign-weighted time at b2 strictly before the first entry into a_set ].
McEstimate mc_conditional_cov(const GeneratorMatrix& q, const SignMatrix& s, Index b, Index b2,
                              const IndexSet& a_set, const McConfig& cfg);

/// Bounded functional of (per-state occupation times, terminal sign).
using PathFunctional = std::function<double(const std::vector<double>& occupation_by_state, int sign_at_death)>;

/// Integral of f against the sub-probability measure that conditions paths
/// from x on dying out of state y, carrying total mass -Q^{-1}(x,y).
/// Rejection estimator: unconditioned paths from x, keep those whose last
/// state is y; throws InsufficientSamplesError when none is accepted.
McEstimate mc_mu_integral(const GeneratorMatrix& q, const SignMatrix& s, Index x, Index y,
                          const PathFunctional& f, const McConfig& cfg);

/// Three routes to E[Z_x Z_y exp(-sum_u d_u Z_u^2 / 2)] for the field with
/// covariance (-Q o S)^{-1}:
///   lhs      - Monte Carlo over field samples,
///   rhs      - mixed path/field sampling through the conditioned-death measure,
///   analytic - determinant-ratio closed form.
struct IsomorphismCheck {
  McEstimate lhs;
  McEstimate rhs;
  double analytic = 0.0;
};

IsomorphismCheck mc_isomorphism_check(const GeneratorMatrix& q, const SignMatrix& s, Index x, Index y,
                                      const Vector& d, const McConfig& cfg);

namespace detail {

/// Fixed block size for deterministic accumulation: items are summed within
/// 4096-item blocks and block partials are folded in block order, so totals
/// are bit-identical for every worker count.
inline constexpr std::size_t kAccumulatorBlock = 4096;

/// Stream-id domains; keeps path draws and field draws decorrelated.
inline constexpr std::uint64_t kPathDomain = 1;
inline constexpr std::uint64_t kFieldDomain = 2;
inline constexpr std::uint64_t kPairedFieldDomain = 3;

/// Runs body(item, acc) for item in [0, n_items), where each block of items
/// accumulates into its own vector of length stat_len; returns the blockwise
/// fold. n_workers > 1 distributes whole blocks across threads.
std::vector<double> accumulate_items(std::size_t n_items, std::size_t stat_len, unsigned n_workers,
                                     const std::function<void(std::size_t, std::vector<double>&)>& body);

McEstimate finalize(std::size_t n, double sum, double sum_sq);

void require_config(const McConfig& cfg);

}  // namespace detail

}  // namespace dynkin
