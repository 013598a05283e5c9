#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "dynkin/chain.hpp"

namespace dynkin {

/// A chain definition: generator plus sign matrix (all ones when omitted).
struct ChainFile {
  GeneratorMatrix generator;
  SignMatrix sign;
};

/// Parses {"states": [...], "Q": [[...]], "S": [[...]]}; S optional.
/// Throws StructuralError with a location for malformed input.
ChainFile parse_chain_json(const std::string& text, const std::string& origin);

ChainFile load_chain_file(const std::string& path);

std::uint64_t fnv1a64(std::string_view bytes);

/// Digest of the file bytes, "fnv1a64:<16 hex digits>".
std::string file_digest(const std::string& path);

}  // namespace dynkin
