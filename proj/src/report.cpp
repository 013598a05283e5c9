#include "dynkin/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace dynkin {

CheckRow mc_row(std::string name, std::string x, std::string y, double mean, double std_error,
                std::size_t n, double analytic) {
  CheckRow row;
  row.name = std::move(name);
  row.x = std::move(x);
  row.y = std::move(y);
  row.mean = mean;
  row.std_error = std_error;
  row.n = n;
  row.analytic = analytic;
  const double diff = mean - analytic;
  if (std_error > 0.0) {
    row.z = diff / std_error;
  } else {
    row.z = (diff == 0.0) ? 0.0 : std::numeric_limits<double>::infinity();
  }
  row.pass = std::abs(row.z) <= 3.0;
  return row;
}

CheckRow deterministic_row(std::string name, std::string x, std::string y, double value, double reference,
                           double tolerance) {
  CheckRow row;
  row.name = std::move(name);
  row.x = std::move(x);
  row.y = std::move(y);
  row.mean = value;
  row.n = 1;
  row.analytic = reference;
  row.tolerance = tolerance;
  row.pass = std::abs(value - reference) <= tolerance;
  return row;
}

CheckRow reported_row(std::string name, std::string x, std::string y, double value, double reference) {
  CheckRow row;
  row.name = std::move(name);
  row.x = std::move(x);
  row.y = std::move(y);
  row.mean = value;
  row.n = 1;
  row.analytic = reference;
  row.pass = true;
  return row;
}

bool all_pass(const std::vector<CheckRow>& rows) {
  for (const auto& row : rows) {
    if (!row.pass) return false;
  }
  return true;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string to_csv(const RunMetadata& meta, const std::vector<CheckRow>& rows) {
  std::ostringstream out;
  out << "# tool_version=" << meta.tool_version << "\n";
  out << "# command=" << meta.command << "\n";
  out << "# chain_digest=" << meta.chain_digest << "\n";
  out << "# seed=" << meta.seed << "\n";
  out << "# n_paths=" << meta.n_paths << "\n";
  for (const auto& [key, value] : meta.extra) {
    out << "# " << key << "=" << value << "\n";
  }
  out << "name,x,y,mean,std_error,n,analytic,z,pass\n";
  for (const auto& row : rows) {
    out << row.name << ',' << row.x << ',' << row.y << ',' << format_double(row.mean) << ','
        << format_double(row.std_error) << ',' << row.n << ',' << format_double(row.analytic) << ','
        << format_double(row.z) << ',' << (row.pass ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string to_json(const RunMetadata& meta, const std::vector<CheckRow>& rows) {
  nlohmann::json doc;
  doc["metadata"] = {
      {"tool_version", meta.tool_version}, {"command", meta.command},
      {"chain_digest", meta.chain_digest}, {"seed", meta.seed},
      {"n_paths", meta.n_paths},
  };
  for (const auto& [key, value] : meta.extra) doc["metadata"][key] = value;
  doc["rows"] = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json j{{"name", row.name}, {"mean", row.mean},     {"std_error", row.std_error},
                     {"n", row.n},       {"analytic", row.analytic}, {"z", row.z},
                     {"pass", row.pass}};
    if (!row.x.empty()) j["x"] = row.x;
    if (!row.y.empty()) j["y"] = row.y;
    if (row.tolerance > 0.0) j["tolerance"] = row.tolerance;
    doc["rows"].push_back(std::move(j));
  }
  doc["all_pass"] = all_pass(rows);
  return doc.dump(2) + "\n";
}

}  // namespace dynkin
