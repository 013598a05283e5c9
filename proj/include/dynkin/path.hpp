#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dynkin/chain.hpp"
#include "dynkin/rng.hpp"

namespace dynkin {

/// One trajectory of the killed chain together with the running sign.
///
/// Entry i records the arrival time S_i at state Y_i and the cumulative sign
/// H at S_i (product of transition signs so far; the jump into the cemetery
/// never flips it). For an absorbed path end_time is the absorption time, so
/// the last holding interval is [jump_times.back(), end_time).
struct PathRecord {
  std::vector<Index> states;
  std::vector<double> jump_times;
  std::vector<int> signs;
  bool absorbed = false;
  double end_time = 0.0;

  std::size_t length() const { return states.size(); }

  /// Duration spent in states[i]; requires an absorbed path for the last entry.
  double holding(std::size_t i) const {
    return (i + 1 < jump_times.size() ? jump_times[i + 1] : end_time) - jump_times[i];
  }

  /// Total lifetime before absorption.
  double lifetime() const { return end_time; }
};

/// Simulates one path: exponential holding at rate rates(Y_i), next state from
/// the p-row with the leftover mass going to the cemetery. Throws PathCapError
/// if max_jumps transitions happen without absorption.
PathRecord sample_path(const EmbeddedChain& chain, const SignMatrix& sign, Index start, RngStream& rng,
                       std::size_t max_jumps);

/// Total time at state x. Requires an absorbed path.
double occupation(const PathRecord& path, Index x);

/// Sign-weighted time at state x: each holding interval carries the sign held
/// on arrival. Requires an absorbed path.
double net_occupation(const PathRecord& path, Index x);

struct Hit {
  std::size_t jump_index;  // i with Y_i the first state of A hit, i >= 1
  double time;             // S_i
  Index state;             // Y_i
  int sign;                // H at S_i
};

/// First entry into a_set at or after the first jump (a path starting inside
/// a_set does not count as an immediate hit). Empty when the path is killed
/// before reaching a_set.
std::optional<Hit> first_hit(const PathRecord& path, const IndexSet& a_set);

}  // namespace dynkin
