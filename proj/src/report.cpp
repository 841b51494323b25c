#include "hyperchain/report.hpp"

#include <cstdio>
#include <sstream>

#include "hyperchain/network_io.hpp"

namespace hyperchain {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string input_hash(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string("fnv1a64:") + buf;
}

std::string_view version() { return HYPERCHAIN_VERSION; }

namespace {

nlohmann::json thresholds(const AnalysisOptions& opts) {
  nlohmann::json t = {{"rank_tolerance", kRankTolerance},
                      {"positivity_tolerance", kPositivityTolerance},
                      {"residual_tolerance", kResidualTolerance},
                      {"sign_tolerance", kSignTolerance},
                      {"lambda1_tolerance", kLambda1Tolerance},
                      {"cross_check_tolerance", kCrossCheckTolerance},
                      {"boundary_enumeration_bound", kBoundaryEnumerationBound},
                      {"enumeration_bound", kEnumerationBound},
                      {"enumeration_cap", kProfileEnumerationCap},
                      {"hamiltonian_node_budget", kHamiltonianNodeBudget}};
  if (opts.permanence) t["permanence"] = to_json(opts.permanence_options);
  return t;
}

std::string species_list(const std::vector<int>& vs) {
  std::string s;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(vs[i] + 1);
  }
  return s;
}

}  // namespace

AnalysisReport analyze_system(const HyperchainSystem& sys, std::string_view input_bytes,
                              const AnalysisOptions& opts) {
  AnalysisReport r;
  r.n = sys.size();
  r.edges = sys.graph().edge_count();
  r.provenance.input_hash = input_hash(input_bytes);
  r.provenance.seed = opts.permanence_options.seed;
  r.provenance.version = std::string(version());
  r.provenance.thresholds = thresholds(opts);

  r.graph_profile = profile_graph(sys.graph());
  if (r.graph_profile.is_rooted)
    r.warnings.push_back("rooted: initial nodes {" + species_list(r.graph_profile.initial_nodes) +
                         "}, no positive equilibrium for any rates");

  r.equilibrium_set = positive_equilibria(sys);
  for (const std::string& w : r.equilibrium_set.warnings) r.warnings.push_back(w);
  if (r.equilibrium_set.point) {
    try {
      r.positive_stability = classify_positive_stability(sys, *r.equilibrium_set.point);
    } catch (const Error& e) {
      r.warnings.push_back("stability: " + std::string(to_string(e.code())) + ": " + e.what());
    }
  }

  try {
    for (BoundaryEquilibrium& beq : boundary_equilibria(sys)) {
      BoundaryEntry entry{std::move(beq), std::nullopt, {}};
      try {
        entry.stability = boundary_stability(sys, entry.equilibrium);
      } catch (const Error& e) {
        entry.error = std::string(to_string(e.code())) + ": " + e.what();
      }
      r.boundary_equilibria.push_back(std::move(entry));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooLarge) throw;
    r.boundary_enumerated = false;
    r.warnings.push_back(std::string("boundary: ") + e.what());
  }

  if (opts.permanence) r.permanence_verdict = numeric_permanence_test(sys, opts.permanence_options);
  return r;
}

nlohmann::json to_json(const AnalysisReport& r) {
  nlohmann::json boundary = nlohmann::json::array();
  for (const BoundaryEntry& b : r.boundary_equilibria) {
    nlohmann::json j = to_json(b.equilibrium);
    j["stability"] = b.stability ? to_json(*b.stability) : nlohmann::json(nullptr);
    if (!b.error.empty()) j["error"] = b.error;
    boundary.push_back(std::move(j));
  }
  nlohmann::json j = {
      {"n", r.n},
      {"edges", r.edges},
      {"graph_profile", to_json(r.graph_profile)},
      {"equilibrium_set", to_json(r.equilibrium_set)},
      {"stability", r.positive_stability ? to_json(*r.positive_stability) : nlohmann::json(nullptr)},
      {"boundary_equilibria", std::move(boundary)},
      {"boundary_enumerated", r.boundary_enumerated},
      {"permanence_verdict",
       r.permanence_verdict ? to_json(*r.permanence_verdict, false) : nlohmann::json(nullptr)},
      {"warnings", r.warnings},
      {"provenance",
       {{"input_hash", r.provenance.input_hash},
        {"seed", r.provenance.seed},
        {"version", r.provenance.version},
        {"thresholds", r.provenance.thresholds}}}};
  return j;
}

std::string to_text(const AnalysisReport& r) {
  const GraphProfile& g = r.graph_profile;
  std::ostringstream os;
  os << std::boolalpha;
  os << "species " << r.n << ", edges " << r.edges << '\n';
  os << "graph: rooted=" << g.is_rooted << " strongly_connected=" << g.strongly_connected
     << " acyclic=" << g.acyclic << " cycle_graph=" << g.is_cycle_graph
     << " spanning_linear_subgraph=" << g.has_spanning_linear_subgraph
     << " hamiltonian=" << to_string(g.hamiltonian_search) << '\n';
  const EquilibriumSet& eq = r.equilibrium_set;
  os << "positive equilibria: " << to_string(eq.kind);
  if (eq.kind == EquilibriumKind::Unique) {
    os << " (";
    for (Eigen::Index i = 0; i < eq.point->size(); ++i)
      os << (i ? ", " : "") << format_shortest(round_significant((*eq.point)[i], 12));
    os << ')';
  } else if (eq.continuum) {
    os << " of dimension " << eq.continuum->dimension();
  }
  os << '\n';
  if (r.positive_stability) os << "stability: " << to_string(r.positive_stability->classification) << '\n';
  os << "boundary equilibria: " << r.boundary_equilibria.size() << '\n';
  for (const BoundaryEntry& b : r.boundary_equilibria) {
    os << "  I={" << species_list(b.equilibrium.face) << "} " << to_string(b.equilibrium.induced.kind);
    if (b.stability) os << ' ' << to_string(b.stability->classification);
    os << '\n';
  }
  if (r.permanence_verdict) {
    os << "permanence: " << to_string(r.permanence_verdict->outcome);
    if (!r.permanence_verdict->witness.empty()) os << " (" << r.permanence_verdict->witness << ')';
    os << '\n';
  }
  for (const std::string& w : r.warnings) os << "warning: " << w << '\n';
  os << "input " << r.provenance.input_hash << ", version " << r.provenance.version << '\n';
  return os.str();
}

}  // namespace hyperchain
