#pragma once

// Randomized audit of the graph/dynamics implications (checks a..i below)
// over sampled hyperchain systems, with reproducible counterexample dumps.
//
//   a  cycle graph                  => sampled K tests LikelyPermanent
//   b  Hamiltonian                  => certificate rates test LikelyPermanent
//   c  LikelyPermanent              => strongly connected and a positive equilibrium
//   d  unrooted <=> constructed rates give a verified positive equilibrium;
//      rooted => Empty for every drawn K
//   e  spanning linear subgraph <=> some drawn or constructed K gives Unique
//   f  LinearlyStable <=> property P
//   g  Unique => spanning linear subgraph; Continuum points are never LinearlyStable
//   h  Hamiltonian                  => spanning linear subgraph and strongly connected
//   i  spanning linear subgraphs of one parity => never Continuum

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyperchain/graph.hpp"
#include "hyperchain/permanence.hpp"

namespace hyperchain {

inline constexpr std::array<char, 9> kAuditChecks = {'a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i'};

std::string_view audit_check_description(char check);

enum class CheckOutcome { Pass, Fail, Inconclusive, NotApplicable };

struct CheckResult {
  char check = 'a';
  CheckOutcome outcome = CheckOutcome::NotApplicable;
  std::string evidence;
  /// Rates of the system the evidence refers to, when it is not the sampled K.
  std::optional<Matrix> rates;
};

/// Footprint of the persistence theorem: a system that is not strongly
/// connected but has a unique positive equilibrium should lose a species.
enum class SoftOutcome { Detected, Undetected, Contradicted };

struct AuditOptions {
  int n_min = 2;
  int n_max = 5;
  int samples = 200;
  std::uint64_t seed = 1;
  int threads = 1;
  /// Random log-uniform K drawn per graph for the "for all K" checks, on top
  /// of the sampled K, the all-ones K and `integer_draws` K with entries in {1, 2, 3}.
  int rate_draws = 20;
  int integer_draws = 5;
  bool include_example_six = true;
  /// Debug: report the first passing instance of this check as a violation.
  std::optional<char> inject;
  PermanenceOptions permanence;
};

struct AuditSample {
  int index = 0;
  std::string family;  // cycle, hamiltonian-plus-chords, random, example-six
  std::uint64_t sample_seed = 0;
  HyperchainSystem system;
  std::vector<CheckResult> results;  // one per check, in kAuditChecks order
  std::optional<SoftOutcome> soft;
  std::string soft_evidence;
};

struct AuditViolation {
  char check = 'a';
  int sample = 0;
  std::uint64_t sample_seed = 0;
  std::string family;
  std::string evidence;
  bool injected = false;
  HyperchainSystem system;  // the sampled system (replay input)
  std::optional<Matrix> witness_rates;
  std::string dump_file;    // set by write_audit_dumps
};

struct CheckTally {
  int pass = 0, fail = 0, inconclusive = 0, not_applicable = 0;
};

struct AuditReport {
  AuditOptions options;
  std::vector<AuditSample> samples;
  std::array<CheckTally, kAuditChecks.size()> tallies{};
  std::vector<AuditViolation> violations;
  int soft_detected = 0, soft_undetected = 0, soft_contradicted = 0;
};

/// Runs every check on one system; K draws are seeded from `sample_seed`.
/// This is the replay entry point for dumped violations.
std::vector<CheckResult> audit_instance(const HyperchainSystem& sys, std::uint64_t sample_seed,
                                        const AuditOptions& opts,
                                        std::optional<SoftOutcome>* soft = nullptr,
                                        std::string* soft_evidence = nullptr);

AuditReport implication_audit(const AuditOptions& opts);

/// Writes one HYPERCHAIN v1 file per violation (plus the witness rates when
/// they differ from the sampled K) and manifest.json into `dir`.
void write_audit_dumps(AuditReport& report, const std::filesystem::path& dir);

std::string_view to_string(CheckOutcome o);
std::string_view to_string(SoftOutcome o);
nlohmann::json to_json(const AuditReport& report, bool include_samples = false);

}  // namespace hyperchain
