#pragma once

// Graph-theoretic classifiers for hyperchains.
//
// Terminology note: "acyclic" means the graph contains no directed cycle
// (a self-loop is a cycle of length one). "Cycle graph" means the whole edge
// set is a single directed cycle through all vertices, i.e. a hypercycle.
// The two predicates are deliberately kept apart; the bare word "cyclic" is
// ambiguous and is not used in this API.

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "hyperchain/graph.hpp"

namespace hyperchain {

/// Hopcroft-Karp maximum matching on a bipartite graph given by left-side
/// adjacency lists. Returns, for each left vertex, its matched right vertex or -1.
std::vector<int> maximum_bipartite_matching(int left_count, int right_count,
                                            const std::vector<std::vector<int>>& adjacency);

enum class Parity { Even, Odd };

/// Spanning subgraph in which every vertex has in- and outdegree one,
/// i.e. a permutation restricted to the edge set. Odd iff it has an odd
/// number of even-length cycles.
struct LinearSubgraph {
  std::vector<int> successor;
  /// Each cycle starts at its smallest vertex; cycles sorted by that vertex.
  std::vector<std::vector<int>> cycles;
  Parity parity = Parity::Even;

  std::vector<Edge> edges() const;
  int even_cycle_count() const;
};

/// Builds the cycle decomposition; throws NotLinear unless `successor` is a permutation.
LinearSubgraph make_linear_subgraph(std::vector<int> successor);

struct NodeClasses {
  std::vector<int> initial;   // indegree 0
  std::vector<int> terminal;  // outdegree 0
};

NodeClasses initial_and_terminal_nodes(const Hyperchain& h);
bool is_rooted(const Hyperchain& h);
bool is_strongly_connected(const Hyperchain& h);
bool is_acyclic(const Hyperchain& h);

/// Decision via perfect matching between tail copies and head copies.
bool has_spanning_linear_subgraph(const Hyperchain& h);
std::optional<LinearSubgraph> find_spanning_linear_subgraph(const Hyperchain& h);

inline constexpr int kEnumerationBound = 12;

/// Exhaustive backtracking in lexicographic order of the successor vector.
/// Without a cap, graphs above kEnumerationBound species throw TooLarge.
std::vector<LinearSubgraph> enumerate_spanning_linear_subgraphs(
    const Hyperchain& h, std::optional<std::size_t> cap = std::nullopt);

/// True when every subgraph in the list has the same parity (vacuous for empty lists).
bool same_parity(const std::vector<LinearSubgraph>& subgraphs);

enum class SearchStatus { Found, Absent, Inconclusive };

struct HamiltonianSearch {
  SearchStatus status = SearchStatus::Absent;
  std::vector<int> cycle;  // vertex order starting at vertex 0
  std::uint64_t nodes_visited = 0;
};

inline constexpr int kHamiltonianBound = 20;
inline constexpr std::uint64_t kHamiltonianNodeBudget = 10'000'000;

/// Backtracking from vertex 0 with neighbours tried in increasing order, so the
/// lexicographically smallest cycle is returned. Throws TooLarge above
/// kHamiltonianBound species.
HamiltonianSearch find_hamiltonian_cycle(const Hyperchain& h,
                                         std::uint64_t node_budget = kHamiltonianNodeBudget);

bool is_cycle_graph(const Hyperchain& h);

/// Checks A(D)^T 1 = 1 and A(D)^T e_i = e_{succ(i)} numerically.
bool linear_digraph_adjacency_checks(const LinearSubgraph& d);
/// Same check for a graph that must itself be linear; throws NotLinear otherwise.
bool linear_digraph_adjacency_checks(const Hyperchain& d);

struct GraphProfile {
  std::vector<int> initial_nodes;
  std::vector<int> terminal_nodes;
  bool is_rooted = false;
  bool strongly_connected = false;
  bool acyclic = false;
  bool has_spanning_linear_subgraph = false;
  bool hamiltonian = false;
  SearchStatus hamiltonian_search = SearchStatus::Absent;
  std::vector<int> hamiltonian_cycle;
  bool is_cycle_graph = false;
  /// Present when n <= kEnumerationBound; truncated at `enumeration_cap`.
  std::optional<std::vector<LinearSubgraph>> spanning_linear_subgraphs;
  bool enumeration_truncated = false;
};

inline constexpr std::size_t kProfileEnumerationCap = 10000;

GraphProfile profile_graph(const Hyperchain& h);

/// 1-based JSON rendering; field names follow GraphProfile.
nlohmann::json to_json(const GraphProfile& profile);
nlohmann::json to_json(const LinearSubgraph& d);
std::string_view to_string(Parity parity);
std::string_view to_string(SearchStatus status);

}  // namespace hyperchain
