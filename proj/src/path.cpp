#include "dynkin/path.hpp"

#include <string>

namespace dynkin {

PathRecord sample_path(const EmbeddedChain& chain, const SignMatrix& sign, Index start, RngStream& rng,
                       std::size_t max_jumps) {
  const Index n = chain.p.rows();
  if (start < 0 || start >= n) throw StructuralError("sample_path: start state out of range");
  if (max_jumps < 1) throw StructuralError("sample_path: max_jumps must be at least 1");

  PathRecord path;
  path.states.push_back(start);
  path.jump_times.push_back(0.0);
  path.signs.push_back(1);

  Index cur = start;
  double t = 0.0;
  int h = 1;
  for (std::size_t jump = 0; jump <= max_jumps; ++jump) {
    t += rng.exponential(chain.rates(cur));

    // Next state from the p-row; the tail mass beyond sum_y p(cur,y) is the cemetery.
    const double u = rng.uniform01();
    double acc = 0.0;
    Index next = -1;
    for (Index y = 0; y < n; ++y) {
      acc += chain.p(cur, y);
      if (u < acc) {
        next = y;
        break;
      }
    }
    if (next < 0) {
      path.absorbed = true;
      path.end_time = t;
      return path;
    }
    if (jump == max_jumps) break;
    h *= sign.sign(cur, next);
    cur = next;
    path.states.push_back(cur);
    path.jump_times.push_back(t);
    path.signs.push_back(h);
  }
  throw PathCapError("path from state " + std::to_string(start) + " exceeded " + std::to_string(max_jumps) +
                     " jumps without absorption (non-transient input or unreachable cemetery?)");
}

namespace {

void require_absorbed(const PathRecord& path) {
  if (!path.absorbed) {
    throw StructuralError("occupation time undefined for an unabsorbed path");
  }
}

}  // namespace

double occupation(const PathRecord& path, Index x) {
  require_absorbed(path);
  double total = 0.0;
  for (std::size_t i = 0; i < path.length(); ++i) {
    if (path.states[i] == x) total += path.holding(i);
  }
  return total;
}

double net_occupation(const PathRecord& path, Index x) {
  require_absorbed(path);
  double total = 0.0;
  for (std::size_t i = 0; i < path.length(); ++i) {
    if (path.states[i] == x) total += path.holding(i) * path.signs[i];
  }
  return total;
}

std::optional<Hit> first_hit(const PathRecord& path, const IndexSet& a_set) {
  for (std::size_t i = 1; i < path.length(); ++i) {
    for (Index a : a_set) {
      if (path.states[i] == a) {
        return Hit{i, path.jump_times[i], path.states[i], path.signs[i]};
      }
    }
  }
  return std::nullopt;
}

}  // namespace dynkin
