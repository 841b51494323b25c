#pragma once

// Hyperchains (catalytic influence networks), rate matrices and the systems
// pairing them. Vertices are 0-based internally; every external format and
// report uses 1-based species labels X_1..X_n.

#include <compare>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hyperchain/error.hpp"

namespace hyperchain {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Directed edge X_tail --> X_head: the tail catalyses replication of the head.
struct Edge {
  int tail = 0;
  int head = 0;
  auto operator<=>(const Edge&) const = default;
};

class Hyperchain {
 public:
  /// Validates: n >= 1, nonempty edge set, indices in range, no duplicates,
  /// every vertex touches at least one edge. Edges are stored sorted.
  Hyperchain(int n, std::vector<Edge> edges);

  int size() const noexcept { return n_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  bool has_edge(int tail, int head) const;
  const std::vector<int>& out_neighbors(int v) const { return out_[v]; }
  const std::vector<int>& in_neighbors(int v) const { return in_[v]; }
  int indegree(int v) const { return static_cast<int>(in_[v].size()); }
  int outdegree(int v) const { return static_cast<int>(out_[v].size()); }

  /// A(H): entry (i,j) is 1 iff X_i --> X_j is an edge.
  Matrix adjacency() const;

  bool operator==(const Hyperchain& other) const {
    return n_ == other.n_ && edges_ == other.edges_;
  }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

/// Construct from 1-based (tail, head) pairs.
Hyperchain new_hyperchain(int n, std::span<const std::pair<int, int>> edges);

/// Nonnegative square matrix of mass-action rate constants; entry (i,j) is
/// k_ij, the rate of the edge X_i --> X_j.
class RateMatrix {
 public:
  explicit RateMatrix(Matrix entries);

  int size() const noexcept { return static_cast<int>(k_.rows()); }
  const Matrix& entries() const noexcept { return k_; }
  double operator()(int i, int j) const { return k_(i, j); }

  /// Edges (i,j) with k_ij > 0, sorted.
  std::vector<Edge> support() const;

 private:
  Matrix k_;
};

/// (H, K): the object every dynamics and equilibrium routine acts on.
class HyperchainSystem {
 public:
  /// Throws SupportMismatch unless k_ij > 0 exactly on the edges of H.
  HyperchainSystem(Hyperchain graph, RateMatrix rates);

  /// Every edge gets the same rate.
  static HyperchainSystem uniform(Hyperchain graph, double rate = 1.0);

  const Hyperchain& graph() const noexcept { return graph_; }
  const RateMatrix& rates() const noexcept { return rates_; }
  const Matrix& K() const noexcept { return rates_.entries(); }
  int size() const noexcept { return graph_.size(); }

 private:
  Hyperchain graph_;
  RateMatrix rates_;
};

/// K|_{H'} = K * A(H') (entrywise). H' must use only edges in the support of K.
RateMatrix restrict_rates(const RateMatrix& k, const Hyperchain& sub);

/// An induced graph that fails the hyperchain invariants (an isolated vertex,
/// possibly no edges at all). Kept so that boundary analysis can still report
/// on it instead of failing.
struct DegenerateNetwork {
  int n = 0;
  std::vector<Edge> edges;
  std::vector<int> isolated;
};

struct InducedSubnetwork {
  std::variant<Hyperchain, DegenerateNetwork> network;
  /// parent[local] is the vertex index in the parent graph.
  std::vector<int> parent;

  bool degenerate() const { return std::holds_alternative<DegenerateNetwork>(network); }
  int size() const { return static_cast<int>(parent.size()); }
  std::span<const Edge> edges() const;
};

/// G[V']: keeps the edges with both endpoints in `vertices` and relabels them
/// 0..|V'|-1 in increasing parent order.
InducedSubnetwork induced_subnetwork(const Hyperchain& h, std::span<const int> vertices);

/// Induced subnetwork together with the restricted rate matrix K[V', V'].
struct InducedSystem {
  InducedSubnetwork sub;
  Matrix rates;
};

InducedSystem induced_system(const HyperchainSystem& sys, std::span<const int> vertices);

}  // namespace hyperchain
