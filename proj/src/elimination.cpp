#include "dynkin/elimination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dynkin {

EliminationState::EliminationState(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw StructuralError("elimination: matrix must be square and non-empty");
  }
  if (max_abs_diff(m_, m_.transpose()) > 1e-12 * std::max(1.0, m_.cwiseAbs().maxCoeff())) {
    throw StructuralError("elimination: matrix must be symmetric");
  }
  vertices_.resize(static_cast<std::size_t>(m_.rows()));
  for (std::size_t i = 0; i < vertices_.size(); ++i) vertices_[i] = static_cast<Index>(i);
}

bool EliminationState::contains(Index v) const {
  return std::binary_search(vertices_.begin(), vertices_.end(), v);
}

Index EliminationState::position_of(Index v, const char* what) const {
  const auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v);
  if (it == vertices_.end() || *it != v) {
    throw StructuralError(std::string(what) + ": vertex " + std::to_string(v) + " not in the remaining set");
  }
  return static_cast<Index>(std::distance(vertices_.begin(), it));
}

double EliminationState::entry(Index x, Index y) const {
  return m_(position_of(x, "entry"), position_of(y, "entry"));
}

void EliminationState::eliminate(Index z) {
  const Index zp = position_of(z, "eliminate");
  const Index n = m_.rows();
  const double pivot = m_(zp, zp);
  if (!(pivot > 0.0)) {
    throw NumericalError("eliminate: loop weight at vertex " + std::to_string(z) + " is not positive", z);
  }

  EliminationStep step;
  step.removed = z;

  Matrix next(n - 1, n - 1);
  for (Index i = 0, ii = 0; i < n; ++i) {
    if (i == zp) continue;
    const double miz = m_(i, zp);
    for (Index j = 0, jj = 0; j < n; ++j) {
      if (j == zp) continue;
      double v = m_(i, j);
      if (miz != 0.0 && m_(j, zp) != 0.0) {
        v -= miz * m_(j, zp) / pivot;
        ++multiplies_;
        if (i < j && m_(i, j) == 0.0 && v != 0.0) {
          step.fill_in.emplace_back(vertices_[static_cast<std::size_t>(i)],
                                    vertices_[static_cast<std::size_t>(j)]);
        }
      }
      if (std::abs(v) < kEliminationSnap) v = 0.0;
      next(ii, jj) = v;
      ++jj;
    }
    ++ii;
  }

  // Dominance must survive the step; a real violation means the input was
  // not a signed precision matrix.
  double min_margin = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < next.rows(); ++i) {
    const double margin = next(i, i) - (next.row(i).cwiseAbs().sum() - std::abs(next(i, i)));
    min_margin = std::min(min_margin, margin);
  }
  if (next.rows() > 0 && min_margin < -1e-9 * std::max(1.0, m_.cwiseAbs().maxCoeff())) {
    throw NumericalError("eliminate: diagonal dominance lost after removing vertex " + std::to_string(z), z);
  }
  step.min_dominance_margin = next.rows() > 0 ? min_margin : 0.0;

  m_ = std::move(next);
  vertices_.erase(vertices_.begin() + zp);
  log_.push_back(std::move(step));
}

Vector EliminationState::coefficients_for(Index v) const {
  const Index vp = position_of(v, "coefficients_for");
  const Index n = m_.rows();
  Vector out(n - 1);
  Index k = 0;
  for (Index j = 0; j < n; ++j) {
    if (j == vp) continue;
    out(k++) = -m_(vp, j) / m_(vp, vp);
  }
  return out;
}

Vector predict_by_elimination(const Matrix& m0, const IndexSet& a_set, Index b, const IndexSet& order) {
  const Index n = m0.rows();
  if (a_set.empty()) throw StructuralError("predict_by_elimination: a_set must be non-empty");
  checked_index_set(a_set, n, "predict_by_elimination a_set");
  if (b < 0 || b >= n) throw StructuralError("predict_by_elimination: target out of range");
  for (Index a : a_set) {
    if (a == b) throw StructuralError("predict_by_elimination: target is in a_set");
  }

  IndexSet kept = a_set;
  kept.push_back(b);
  IndexSet expected = complement_of(kept, n);
  IndexSet sorted_order = checked_index_set(order, n, "predict_by_elimination order");
  std::sort(sorted_order.begin(), sorted_order.end());
  if (sorted_order != expected) {
    throw StructuralError(
        "predict_by_elimination: order must be a permutation of the states outside a_set and b");
  }

  EliminationState state(m0);
  for (Index z : order) state.eliminate(z);

  Vector out(static_cast<Index>(a_set.size()));
  for (std::size_t j = 0; j < a_set.size(); ++j) {
    out(static_cast<Index>(j)) = -state.entry(a_set[j], b) / state.entry(b, b);
  }
  return out;
}

IndexSet min_degree_order(const Matrix& m0, const IndexSet& keep) {
  const Index n = m0.rows();
  checked_index_set(keep, n, "min_degree_order keep");
  std::vector<char> protected_v(static_cast<std::size_t>(n), 0);
  for (Index v : keep) protected_v[static_cast<std::size_t>(v)] = 1;

  // Edge set evolves by the same union rule elimination applies; weights are
  // irrelevant for order selection.
  std::vector<std::vector<char>> edge(static_cast<std::size_t>(n),
                                      std::vector<char>(static_cast<std::size_t>(n), 0));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j && m0(i, j) != 0.0) edge[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
    }
  }
  std::vector<char> alive(static_cast<std::size_t>(n), 1);

  IndexSet order;
  for (;;) {
    Index best = -1;
    Index best_degree = n + 1;
    for (Index v = 0; v < n; ++v) {
      if (!alive[static_cast<std::size_t>(v)] || protected_v[static_cast<std::size_t>(v)]) continue;
      Index degree = 0;
      for (Index w = 0; w < n; ++w) {
        if (alive[static_cast<std::size_t>(w)] && edge[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)]) {
          ++degree;
        }
      }
      if (degree < best_degree) {
        best_degree = degree;
        best = v;
      }
    }
    if (best < 0) break;
    order.push_back(best);
    alive[static_cast<std::size_t>(best)] = 0;
    for (Index x = 0; x < n; ++x) {
      if (!alive[static_cast<std::size_t>(x)] || !edge[static_cast<std::size_t>(x)][static_cast<std::size_t>(best)]) continue;
      for (Index y = 0; y < n; ++y) {
        if (y == x || !alive[static_cast<std::size_t>(y)]) continue;
        if (edge[static_cast<std::size_t>(y)][static_cast<std::size_t>(best)]) {
          edge[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] = 1;
          edge[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] = 1;
        }
      }
    }
  }
  return order;
}

}  // namespace dynkin
