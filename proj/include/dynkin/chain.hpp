#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dynkin/linalg.hpp"

namespace dynkin {

/// Symmetric rate matrix of a killed reversible chain. Off-diagonal entries
/// are jump rates, each diagonal entry the negative total rate out of the
/// state; rows summing strictly below zero leak mass to the cemetery.
struct GeneratorMatrix {
  std::vector<std::string> states;
  Matrix q;

  Index size() const { return q.rows(); }
  const std::string& label(Index i) const { return states[static_cast<std::size_t>(i)]; }
  /// Index of a state label; throws StructuralError if unknown.
  Index index_of(const std::string& label) const;
};

/// Symmetric {-1,+1} matrix with unit diagonal assigning a sign to each transition.
struct SignMatrix {
  Matrix s;

  static SignMatrix all_positive(Index n) { return SignMatrix{Matrix::Ones(n, n)}; }
  int sign(Index x, Index y) const { return s(x, y) > 0 ? 1 : -1; }
};

/// Discrete-time jump chain of a generator: p(x,y) = -q(x,y)/q(x,x),
/// kill(x) the per-jump cemetery probability, rates(x) = -q(x,x).
struct EmbeddedChain {
  Matrix p;
  Vector kill;
  Vector rates;
};

struct CovarianceMatrix {
  Matrix sigma;
};

enum class TransienceMode { T1, T2, Both, Neither };

const char* to_string(TransienceMode mode);

struct ValidationReport {
  bool symmetric_ok = false;
  bool sign_pattern_ok = false;
  bool row_sums_ok = false;
  bool irreducible = false;
  TransienceMode transience_mode = TransienceMode::Neither;

  bool valid() const {
    return symmetric_ok && sign_pattern_ok && row_sums_ok && transience_mode != TransienceMode::Neither;
  }
};

/// Absolute tolerance for symmetry / row-sum checks; "strictly negative"
/// means below -kValidationTol.
inline constexpr double kValidationTol = 1e-12;

/// Checks sign pattern, symmetry, row sums and the two sufficient transience
/// conditions (irreducible with some strictly negative row sum; or every row
/// sum strictly negative). Throws StructuralError for a non-square or empty
/// matrix; every other defect is reported through the flags.
ValidationReport validate_generator(const GeneratorMatrix& q);

/// Throws ValidationError unless validate_generator passes.
void require_valid(const GeneratorMatrix& q);

/// Throws StructuralError unless s is a valid n-by-n sign matrix.
void require_sign_matrix(const SignMatrix& s, Index n);

EmbeddedChain embedded_chain(const GeneratorMatrix& q);

/// M = -Q o S (Hadamard product). Diagonally dominant with positive diagonal
/// for any valid generator, hence positive definite.
Matrix signed_precision(const GeneratorMatrix& q, const SignMatrix& s);

/// Sigma = (-Q o S)^{-1} by dense factorization.
CovarianceMatrix covariance_direct(const GeneratorMatrix& q, const SignMatrix& s);

/// Same inverse through the jump-chain series sum_n (P o S)^n scaled by the
/// holding rates. Truncates when the added term's sup-norm falls below
/// tol relative to the running sum; throws ConvergenceError at max_terms.
CovarianceMatrix covariance_neumann(const GeneratorMatrix& q, const SignMatrix& s, double tol,
                                    int max_terms);

/// Series route on a raw embedded chain, no validation. Near-recurrent
/// inputs surface here as ConvergenceError.
Matrix neumann_inverse(const EmbeddedChain& chain, const SignMatrix& s, double tol, int max_terms);

/// M_AA - M_AB (M_BB)^{-1} M_BA for the kept index set A (result follows the
/// order of `keep`). Keeping everything returns m unchanged.
Matrix schur_restrict(const Matrix& m, const IndexSet& keep);

/// -Q^{-1}: expected total occupation times, entrywise nonnegative.
/// Same routine as covariance_direct with the all-positive sign matrix.
Matrix expected_occupation(const GeneratorMatrix& q);

/// Sign/magnitude split of a signed precision matrix back into (Q, S).
/// Off-diagonal zeros make the sign unrecoverable; those positions are
/// listed as indeterminate (upper triangle only) and default to +1.
struct PrecisionSplit {
  Matrix q;
  Matrix s;
  std::vector<std::pair<Index, Index>> indeterminate;
};

PrecisionSplit split_signed_precision(const Matrix& m);

}  // namespace dynkin
