#pragma once

#include <vector>

#include "dynkin/chain.hpp"
#include "dynkin/rng.hpp"

namespace dynkin::testing {

inline Matrix mat(const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<Index>(rows.size());
  const auto m = static_cast<Index>(rows.empty() ? 0 : rows[0].size());
  Matrix out(n, m);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) out(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return out;
}

inline GeneratorMatrix generator(const std::vector<std::vector<double>>& rows) {
  GeneratorMatrix gen;
  gen.q = mat(rows);
  for (Index i = 0; i < gen.q.rows(); ++i) gen.states.push_back("s" + std::to_string(i));
  return gen;
}

/// Path chain with unit edge rates and unit kill rate at every state
/// (diagonal -(degree + 1)); transient in both modes.
inline GeneratorMatrix path_chain(Index n) {
  GeneratorMatrix gen;
  gen.q = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    gen.states.push_back("s" + std::to_string(i));
    if (i + 1 < n) gen.q(i, i + 1) = gen.q(i + 1, i) = 1.0;
  }
  for (Index i = 0; i < n; ++i) gen.q(i, i) = -(gen.q.row(i).sum() + 1.0);
  return gen;
}

/// Cycle with unit edge rates and unit kill everywhere.
inline GeneratorMatrix cycle_chain(Index n) {
  GeneratorMatrix gen;
  gen.q = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    gen.states.push_back("s" + std::to_string(i));
    gen.q(i, (i + 1) % n) = 1.0;
    gen.q((i + 1) % n, i) = 1.0;
  }
  for (Index i = 0; i < n; ++i) gen.q(i, i) = -3.0;
  return gen;
}

/// Random symmetric generator: a path backbone keeps it irreducible, extra
/// edges appear with edge_prob, and every state keeps at least min_kill of
/// its jump mass for the cemetery (so both transience conditions hold and
/// series routes converge briskly).
inline GeneratorMatrix random_valid_generator(RngStream& rng, Index n, double edge_prob = 0.4,
                                              double min_kill = 0.3) {
  GeneratorMatrix gen;
  gen.q = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) gen.states.push_back("s" + std::to_string(i));
  if (n == 1) {
    gen.q(0, 0) = -(0.5 + rng.uniform01());
    return gen;
  }
  for (Index i = 0; i + 1 < n; ++i) {
    const double w = 0.5 + rng.uniform01();
    gen.q(i, i + 1) = gen.q(i + 1, i) = w;
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 2; j < n; ++j) {
      if (rng.uniform01() < edge_prob) {
        const double w = 0.2 + rng.uniform01();
        gen.q(i, j) = gen.q(j, i) = w;
      }
    }
  }
  for (Index i = 0; i < n; ++i) {
    const double off = gen.q.row(i).sum();
    const double kill = min_kill + 0.3 * rng.uniform01();
    gen.q(i, i) = -off / (1.0 - kill);
  }
  return gen;
}

inline SignMatrix random_sign_matrix(RngStream& rng, Index n) {
  SignMatrix sign = SignMatrix::all_positive(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      sign.s(i, j) = sign.s(j, i) = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    }
  }
  return sign;
}

}  // namespace dynkin::testing
