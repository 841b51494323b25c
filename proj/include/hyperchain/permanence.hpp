#pragma once

// Numeric permanence verdicts and the rate constructions that certify or
// refute permanence.
//
// Permanence here means: there is delta > 0 with
//   liminf_{t -> inf} min_i x_i(t) >= delta
// for every interior initial condition of the relative system. A finite
// computation can only provide evidence, so verdicts include Inconclusive.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyperchain/dynamics.hpp"
#include "hyperchain/equilibria.hpp"
#include "hyperchain/graph.hpp"
#include "hyperchain/graph_analysis.hpp"

namespace hyperchain {

struct PermanenceOptions {
  double t_end = 500.0;
  double window_fraction = 0.2;   // late window is [(1 - f) t_end, t_end]
  double boundary_offset = 1e-3;  // inward offset of near-boundary starts
  double delta = 1e-4;            // LikelyPermanent threshold
  double fail_bound = 1e-8;       // NotPermanent threshold (with decreasing trend)
  int random_starts = 20;
  int max_face_dimension = 2;     // faces of dimension <= this get a start
  int max_face_codimension = 2;   // and so do faces of codimension <= this
  std::uint64_t seed = 0;
  double rtol = 1e-8;
  double atol = 1e-10;
  int threads = 1;
  /// Every trial is continued over doubling segments up to
  /// extension_factor * t_end, until the segment minimum of ln min_i x_i
  /// moves by at most settle_tolerance.
  double extension_factor = 32.0;
  double settle_tolerance = 0.05;
  /// Skip the graph and equilibrium short-circuits and always integrate.
  bool numeric_only = false;
};

enum class PermanenceOutcome { LikelyPermanent, NotPermanent, Inconclusive };

/// What the horizon extension found for a trial.
enum class FollowUp { NotRun, Settled, Decaying, Unresolved };

struct PermanenceTrial {
  std::string label;             // e.g. "face{1,3}", "boundary-eq{2}", "random#4"
  Vector x0;
  double late_min = 0.0;         // min over the window of min_i x_i
  double late_min_log = 0.0;     // same, as ln
  double overall_min_log = 0.0;  // over the whole horizon
  double trend = 0.0;            // slope of ln min_i x_i across the window halves
  Termination termination = Termination::Completed;
  Vector final_state;
  FollowUp follow_up = FollowUp::NotRun;
  double follow_up_horizon = 0.0;
  double floor_log = 0.0;        // last segment minimum of ln min_i x_i when followed up
};

struct PermanenceVerdict {
  PermanenceOutcome outcome = PermanenceOutcome::Inconclusive;
  /// "not strongly connected", "no positive equilibrium" or "trajectory".
  std::string witness;
  std::optional<int> witness_trial;
  double delta_estimate = 0.0;  // min over trials of late_min (NaN before integration)
  /// Min over trials of the last segment minimum (or late_min when not followed up).
  double floor_estimate = 0.0;
  /// True when some trial went below delta and the verdict rests on horizon extension.
  bool extended = false;
  int trials = 0;
  PermanenceOptions parameters;
  std::vector<PermanenceTrial> trial_results;
  std::optional<EquilibriumSet> equilibria;
};

/// The deterministic start battery: faces of small dimension and codimension,
/// faces carrying boundary equilibria, and seeded random near-boundary mixtures.
std::vector<PermanenceTrial> permanence_battery(const HyperchainSystem& sys,
                                                const PermanenceOptions& opts);

PermanenceVerdict numeric_permanence_test(const HyperchainSystem& sys,
                                          const PermanenceOptions& opts = {});

/// Rate 1 on a Hamiltonian cycle and 1/(4n) on every other edge.
/// Throws NotHamiltonian when no Hamiltonian cycle is found.
RateMatrix hamiltonian_permanence_rates(const Hyperchain& h);

struct NonpermanenceConstruction {
  RateMatrix rates;           // K_epsilon
  RateMatrix limit_rates;     // K_0 (epsilon = 0, not a valid system on its own)
  LinearSubgraph cover;       // lexicographically smallest spanning linear subgraph
  Edge special{};             // a --> b, not in the cover, rate 2
  int c = 0;                  // c --> b is the cover edge into b
  Vector z;                   // (1 - 2 e_c) / (n - 2); unscaled when n == 2
  bool normalized = true;     // false when n == 2 (the entries of z sum to 0)
  double identity_residual = 0.0;  // max-norm of K_0^T z - (1/(n-2)) 1 (or of K_0^T w - 1)
};

/// Requires a strongly connected graph with a spanning linear subgraph that is
/// not a single cycle; throws Inapplicable otherwise.
NonpermanenceConstruction nonpermanence_rates(const Hyperchain& h, double epsilon = 1e-3);

/// Lexicographically smallest successor assignment among all spanning linear subgraphs.
std::optional<LinearSubgraph> smallest_spanning_linear_subgraph(const Hyperchain& h);

/// (1/T) * integral over [0, T] of sum_i (f_i(x) - rho(x)) along the relative orbit from x0.
double psi_average(const HyperchainSystem& sys, const Vector& x0, double t_end,
                   const IntegrationOptions& opts = {});

std::string_view to_string(PermanenceOutcome o);
std::string_view to_string(FollowUp f);
nlohmann::json to_json(const PermanenceOptions& o);
nlohmann::json to_json(const PermanenceVerdict& v, bool include_trials = true);

}  // namespace hyperchain
