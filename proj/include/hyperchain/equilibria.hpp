#pragma once

// Positive and boundary equilibria of the relative-concentration system
//   x' = x * (K^T x - (x^T K^T x) 1)
// on the simplex, and the rate constructions that force existence or
// uniqueness of a positive equilibrium.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyperchain/graph.hpp"
#include "hyperchain/graph_analysis.hpp"

namespace hyperchain {

inline constexpr double kRankTolerance = 1e-10;      // relative to sigma_max
inline constexpr double kPositivityTolerance = 1e-12;
inline constexpr double kResidualTolerance = 1e-9;
inline constexpr int kBoundaryEnumerationBound = 14;
inline constexpr int kVertexReportDimension = 3;

enum class EquilibriumKind { Empty, Unique, Continuum };

/// Closure of a continuum of positive equilibria: {base + basis * c} intersected
/// with the simplex. Only the open-simplex part consists of positive equilibria;
/// the closure reaches the boundary at the listed vertices.
struct ContinuumSet {
  Vector base;   // a point of the open continuum
  Matrix basis;  // n x d, orthonormal columns, each summing to zero
  /// d == 1: parameter range of c in the closure.
  std::optional<std::pair<double, double>> interval;
  /// Vertices of the closure; filled when d <= kVertexReportDimension.
  std::vector<Vector> vertices;
  /// Largest achievable minimum coordinate over the continuum.
  double depth = 0.0;

  int dimension() const { return static_cast<int>(basis.cols()); }
  Vector at(const Vector& c) const { return base + basis * c; }
};

struct EquilibriumSet {
  EquilibriumKind kind = EquilibriumKind::Empty;
  /// Unique: the equilibrium. Continuum: continuum->base. Empty: unset.
  std::optional<Vector> point;
  std::optional<ContinuumSet> continuum;
  /// max-norm of K^T x - (x^T K^T x) 1 over the reported points.
  double residual = 0.0;
  int rank = 0;
  bool invertible = false;
  std::vector<std::string> warnings;
};

/// 0/1/infinity classification. Accepts any nonnegative square matrix,
/// including those of degenerate induced networks.
EquilibriumSet positive_equilibria(const Matrix& k);
EquilibriumSet positive_equilibria(const HyperchainSystem& sys);

/// Right-hand side of the relative system for an arbitrary K.
Vector replicator_field(const Matrix& k, const Vector& x);
/// max-norm of K^T x - (x^T K^T x) 1.
double equilibrium_residual(const Matrix& k, const Vector& x);

/// k_ji = 1 / indegree(X_i) on every edge X_j --> X_i. Throws RootedGraph.
RateMatrix construct_existence_rates(const Hyperchain& h);

/// Rate 1 on a spanning linear subgraph, epsilon elsewhere. The subgraph is
/// found internally unless given. Throws NoSpanningLinearSubgraph, or
/// NotASubgraph when the given subgraph uses a missing edge.
RateMatrix construct_uniqueness_rates(const Hyperchain& h, double epsilon = 1e-3,
                                      const std::optional<LinearSubgraph>& subgraph = std::nullopt);

struct BoundaryEquilibrium {
  std::vector<int> face;     // I: coordinates that vanish, sorted
  std::vector<int> support;  // complement of I, sorted
  Vector point;              // embedding with zeros on I
  EquilibriumSet induced;    // positive equilibria of the induced system on the support

  /// Embeds an induced-system vector into R^n.
  Vector embed(const Vector& local) const;
};

/// All faces carrying an equilibrium, ordered lexicographically by I.
/// Throws TooLarge above kBoundaryEnumerationBound species.
std::vector<BoundaryEquilibrium> boundary_equilibria(const HyperchainSystem& sys);

std::string_view to_string(EquilibriumKind kind);

/// 1-based indices; points rounded to 12 significant digits.
nlohmann::json to_json(const EquilibriumSet& set);
nlohmann::json to_json(const BoundaryEquilibrium& beq);
nlohmann::json vector_to_json(const Vector& v, int digits = 12);

}  // namespace hyperchain
