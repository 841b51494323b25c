#pragma once

// Full analysis of one system: graph profile, equilibria, stability and
// (optionally) a permanence verdict, with enough provenance to reproduce it.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hyperchain/equilibria.hpp"
#include "hyperchain/graph_analysis.hpp"
#include "hyperchain/permanence.hpp"
#include "hyperchain/stability.hpp"

namespace hyperchain {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
/// "fnv1a64:" followed by 16 hex digits.
std::string input_hash(std::string_view bytes);

struct Provenance {
  std::string input_hash;  // of the raw input bytes
  std::uint64_t seed = 0;
  std::string version;
  nlohmann::json thresholds;
};

struct AnalysisOptions {
  bool permanence = false;
  PermanenceOptions permanence_options;
};

struct BoundaryEntry {
  BoundaryEquilibrium equilibrium;
  std::optional<StabilityReport> stability;
  std::string error;  // set when the stability analysis threw
};

struct AnalysisReport {
  int n = 0;
  std::size_t edges = 0;
  GraphProfile graph_profile;
  EquilibriumSet equilibrium_set;
  /// Stability at the unique equilibrium, or at the base point of a continuum.
  std::optional<StabilityReport> positive_stability;
  std::vector<BoundaryEntry> boundary_equilibria;
  bool boundary_enumerated = true;
  std::optional<PermanenceVerdict> permanence_verdict;
  std::vector<std::string> warnings;
  Provenance provenance;
};

AnalysisReport analyze_system(const HyperchainSystem& sys, std::string_view input_bytes,
                              const AnalysisOptions& opts = {});

nlohmann::json to_json(const AnalysisReport& report);
std::string to_text(const AnalysisReport& report);

/// Library version string.
std::string_view version();

}  // namespace hyperchain
