#pragma once

// Network file formats.
//
// HYPERCHAIN v1 (text):
//   # comment lines and trailing comments start with '#'
//   n <count>
//   <tail> <head> <rate>      one line per edge, 1-based, rate > 0
//
// JSON:
//   {"n": 3, "edges": [{"tail": 1, "head": 2, "rate": 1.0}, ...]}

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hyperchain/graph.hpp"

namespace hyperchain {

HyperchainSystem parse_network_text(std::string_view text);
HyperchainSystem parse_network_json(std::string_view text);

/// Dispatches on the first non-blank character: '{' means JSON.
HyperchainSystem parse_network(std::string_view text);
HyperchainSystem load_network(const std::filesystem::path& path);

std::string format_network_text(const HyperchainSystem& sys, std::string_view comment = {});
nlohmann::json network_to_json(const HyperchainSystem& sys);

/// Shortest decimal string that round-trips to the same double.
std::string format_shortest(double value);

/// Value rounded to the given number of significant digits.
double round_significant(double value, int digits);

}  // namespace hyperchain
