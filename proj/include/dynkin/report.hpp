#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dynkin {

/// One estimator or check row: Monte Carlo rows pass on |z| <= 3, deterministic
/// rows (std_error 0, tolerance > 0) pass on |mean - analytic| <= tolerance.
struct CheckRow {
  std::string name;
  std::string x;
  std::string y;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  double analytic = 0.0;
  double z = 0.0;
  bool pass = false;
  double tolerance = 0.0;  // 0 for Monte Carlo rows
};

CheckRow mc_row(std::string name, std::string x, std::string y, double mean, double std_error,
                std::size_t n, double analytic);

CheckRow deterministic_row(std::string name, std::string x, std::string y, double value, double reference,
                           double tolerance);

/// Informational row: the value/reference discrepancy is recorded but never
/// fails the run (used for formulas that are computed-and-compared only).
CheckRow reported_row(std::string name, std::string x, std::string y, double value, double reference);

bool all_pass(const std::vector<CheckRow>& rows);

/// Run provenance embedded in every output file; rerunning with identical
/// metadata must reproduce the file bit for bit.
struct RunMetadata {
  std::string tool_version;
  std::string command;
  std::string chain_digest;
  std::uint64_t seed = 0;
  std::size_t n_paths = 0;
  std::map<std::string, std::string> extra;  // suite name, flags, ...
};

std::string to_csv(const RunMetadata& meta, const std::vector<CheckRow>& rows);
std::string to_json(const RunMetadata& meta, const std::vector<CheckRow>& rows);

/// Number formatted with 17 significant digits (round-trip exact).
std::string format_double(double v);

}  // namespace dynkin
