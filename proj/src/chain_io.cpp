#include "dynkin/chain_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace dynkin {

namespace {

Matrix parse_matrix(const nlohmann::json& rows, std::size_t n, const std::string& origin,
                    const char* name) {
  if (!rows.is_array() || rows.size() != n) {
    throw StructuralError(origin + ": \"" + name + "\" must be an array of " + std::to_string(n) + " rows");
  }
  Matrix m(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || row.size() != n) {
      throw StructuralError(origin + ": \"" + name + "\" row " + std::to_string(i) + " must have " +
                            std::to_string(n) + " entries");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!row[j].is_number()) {
        throw StructuralError(origin + ": \"" + name + "\" entry (" + std::to_string(i) + "," +
                              std::to_string(j) + ") is not a number");
      }
      m(static_cast<Index>(i), static_cast<Index>(j)) = row[j].get<double>();
    }
  }
  return m;
}

}  // namespace

ChainFile parse_chain_json(const std::string& text, const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw StructuralError(origin + ": " + e.what());
  }
  if (!doc.is_object()) throw StructuralError(origin + ": top level must be an object");
  if (!doc.contains("states") || !doc["states"].is_array() || doc["states"].empty()) {
    throw StructuralError(origin + ": \"states\" must be a non-empty array of labels");
  }

  ChainFile out;
  std::set<std::string> seen;
  for (const auto& item : doc["states"]) {
    if (!item.is_string()) throw StructuralError(origin + ": state labels must be strings");
    const auto label = item.get<std::string>();
    if (!seen.insert(label).second) {
      throw StructuralError(origin + ": duplicate state label '" + label + "'");
    }
    out.generator.states.push_back(label);
  }
  const std::size_t n = out.generator.states.size();

  if (!doc.contains("Q")) throw StructuralError(origin + ": missing \"Q\"");
  out.generator.q = parse_matrix(doc["Q"], n, origin, "Q");

  if (doc.contains("S")) {
    out.sign.s = parse_matrix(doc["S"], n, origin, "S");
    require_sign_matrix(out.sign, static_cast<Index>(n));
  } else {
    out.sign = SignMatrix::all_positive(static_cast<Index>(n));
  }
  return out;
}

ChainFile load_chain_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructuralError("cannot open chain file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_chain_json(buf.str(), path);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructuralError("cannot open file '" + path + "' for digest");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
  return std::string("fnv1a64:") + hex;
}

}  // namespace dynkin
