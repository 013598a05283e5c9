#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "dynkin/chain.hpp"

namespace dynkin {

/// Trace record of one elimination step.
struct EliminationStep {
  Index removed = -1;
  std::vector<std::pair<Index, Index>> fill_in;  // edges created, original labels, x < y
  double min_dominance_margin = 0.0;             // min over rows of diag - sum |off-diag| afterwards
};

/// Sequential vertex elimination on a symmetric diagonally dominant matrix
/// with positive diagonal (a signed precision matrix). Removing z applies the
/// one-vertex Schur update m(x,y) -= m(x,z) m(y,z) / m(z,z) and drops row and
/// column z; diagonal dominance is re-checked after every step.
///
/// Vertices keep their original labels throughout; `matrix()` is indexed by
/// the current `vertices()` order (ascending).
class EliminationState {
 public:
  explicit EliminationState(Matrix m);

  const IndexSet& vertices() const { return vertices_; }
  const Matrix& matrix() const { return m_; }
  const std::vector<EliminationStep>& log() const { return log_; }
  std::size_t multiply_count() const { return multiplies_; }

  bool contains(Index v) const;

  /// Entry by original vertex labels.
  double entry(Index x, Index y) const;

  void eliminate(Index z);

  /// Weights for predicting vertex v from every other remaining vertex:
  /// -M(v,w)/M(v,v), ordered like vertices() with v skipped.
  Vector coefficients_for(Index v) const;

 private:
  Index position_of(Index v, const char* what) const;

  IndexSet vertices_;
  Matrix m_;
  std::vector<EliminationStep> log_;
  std::size_t multiplies_ = 0;
};

/// Entries this close to zero after an update are snapped to exact zero so the
/// support graph stays meaningful.
inline constexpr double kEliminationSnap = 1e-14;

/// Eliminates `order` (a permutation of everything outside a_set and b) from
/// m0 and reads off the prediction weights -M(a,b)/M(b,b), one per a_set entry.
Vector predict_by_elimination(const Matrix& m0, const IndexSet& a_set, Index b, const IndexSet& order);

/// Minimum-degree elimination order for the vertices outside `keep`, on the
/// support graph of m0 (ties broken by smallest label).
IndexSet min_degree_order(const Matrix& m0, const IndexSet& keep);

}  // namespace dynkin
