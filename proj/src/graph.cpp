#include "hyperchain/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hyperchain {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyEdgeSet: return "EmptyEdgeSet";
    case ErrorCode::IsolatedVertex: return "IsolatedVertex";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::InvalidRate: return "InvalidRate";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::NotASubgraph: return "NotASubgraph";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NotLinear: return "NotLinear";
    case ErrorCode::RootedGraph: return "RootedGraph";
    case ErrorCode::NoSpanningLinearSubgraph: return "NoSpanningLinearSubgraph";
    case ErrorCode::NotAnEquilibrium: return "NotAnEquilibrium";
    case ErrorCode::Lambda1NotFound: return "Lambda1NotFound";
    case ErrorCode::NotAnEigenpair: return "NotAnEigenpair";
    case ErrorCode::NotHamiltonian: return "NotHamiltonian";
    case ErrorCode::Inapplicable: return "Inapplicable";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

std::string edge_label(const Edge& e) {
  std::ostringstream os;
  os << '(' << e.tail + 1 << ',' << e.head + 1 << ')';
  return os.str();
}

}  // namespace

Hyperchain::Hyperchain(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ < 1) throw Error(ErrorCode::InvalidArgument, "species count must be at least 1");
  if (edges_.empty()) throw Error(ErrorCode::EmptyEdgeSet, "hyperchain needs at least one edge");
  for (const Edge& e : edges_) {
    if (e.tail < 0 || e.tail >= n_ || e.head < 0 || e.head >= n_)
      throw Error(ErrorCode::IndexOutOfRange, "edge " + edge_label(e) + " out of range for n=" +
                                                  std::to_string(n_));
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end())
    throw Error(ErrorCode::DuplicateEdge, "duplicate edge " + edge_label(*dup));

  out_.assign(n_, {});
  in_.assign(n_, {});
  for (const Edge& e : edges_) {
    out_[e.tail].push_back(e.head);
    in_[e.head].push_back(e.tail);
  }
  for (int v = 0; v < n_; ++v) {
    if (out_[v].empty() && in_[v].empty())
      throw Error(ErrorCode::IsolatedVertex, "vertex " + std::to_string(v + 1) + " is isolated");
  }
}

bool Hyperchain::has_edge(int tail, int head) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{tail, head});
}

Matrix Hyperchain::adjacency() const {
  Matrix a = Matrix::Zero(n_, n_);
  for (const Edge& e : edges_) a(e.tail, e.head) = 1.0;
  return a;
}

Hyperchain new_hyperchain(int n, std::span<const std::pair<int, int>> edges) {
  std::vector<Edge> zero_based;
  zero_based.reserve(edges.size());
  for (auto [tail, head] : edges) zero_based.push_back({tail - 1, head - 1});
  return Hyperchain(n, std::move(zero_based));
}

RateMatrix::RateMatrix(Matrix entries) : k_(std::move(entries)) {
  if (k_.rows() != k_.cols() || k_.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch, "rate matrix must be square and nonempty");
  for (Eigen::Index i = 0; i < k_.rows(); ++i)
    for (Eigen::Index j = 0; j < k_.cols(); ++j)
      if (!std::isfinite(k_(i, j)) || k_(i, j) < 0.0)
        throw Error(ErrorCode::InvalidRate, "rate k_" + std::to_string(i + 1) + "," +
                                                std::to_string(j + 1) + " must be finite and >= 0");
}

std::vector<Edge> RateMatrix::support() const {
  std::vector<Edge> out;
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j)
      if (k_(i, j) > 0.0) out.push_back({i, j});
  return out;
}

HyperchainSystem::HyperchainSystem(Hyperchain graph, RateMatrix rates)
    : graph_(std::move(graph)), rates_(std::move(rates)) {
  if (rates_.size() != graph_.size())
    throw Error(ErrorCode::DimensionMismatch, "rate matrix size differs from species count");
  const std::vector<Edge> support = rates_.support();
  if (!std::equal(support.begin(), support.end(), graph_.edges().begin(), graph_.edges().end())) {
    for (const Edge& e : graph_.edges())
      if (rates_(e.tail, e.head) <= 0.0)
        throw Error(ErrorCode::SupportMismatch, "edge " + edge_label(e) + " has no positive rate");
    throw Error(ErrorCode::SupportMismatch, "positive rate on a pair that is not an edge");
  }
}

HyperchainSystem HyperchainSystem::uniform(Hyperchain graph, double rate) {
  if (!(rate > 0.0)) throw Error(ErrorCode::InvalidRate, "uniform rate must be positive");
  Matrix k = graph.adjacency() * rate;
  return HyperchainSystem(std::move(graph), RateMatrix(std::move(k)));
}

RateMatrix restrict_rates(const RateMatrix& k, const Hyperchain& sub) {
  if (sub.size() != k.size())
    throw Error(ErrorCode::NotASubgraph, "subgraph has a different species count");
  for (const Edge& e : sub.edges())
    if (k(e.tail, e.head) <= 0.0)
      throw Error(ErrorCode::NotASubgraph, "edge " + edge_label(e) + " is not in the parent graph");
  return RateMatrix(k.entries().cwiseProduct(sub.adjacency()));
}

std::span<const Edge> InducedSubnetwork::edges() const {
  if (const auto* h = std::get_if<Hyperchain>(&network)) return h->edges();
  return std::get<DegenerateNetwork>(network).edges;
}

namespace {

std::vector<int> normalized_subset(int n, std::span<const int> vertices) {
  if (vertices.empty()) throw Error(ErrorCode::EmptySubset, "vertex subset is empty");
  std::vector<int> vs(vertices.begin(), vertices.end());
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  if (vs.front() < 0 || vs.back() >= n)
    throw Error(ErrorCode::IndexOutOfRange, "vertex subset index out of range");
  return vs;
}

}  // namespace

InducedSubnetwork induced_subnetwork(const Hyperchain& h, std::span<const int> vertices) {
  std::vector<int> parent = normalized_subset(h.size(), vertices);
  std::vector<int> local(h.size(), -1);
  for (int i = 0; i < static_cast<int>(parent.size()); ++i) local[parent[i]] = i;

  std::vector<Edge> edges;
  for (const Edge& e : h.edges())
    if (local[e.tail] >= 0 && local[e.head] >= 0) edges.push_back({local[e.tail], local[e.head]});

  const int m = static_cast<int>(parent.size());
  std::vector<bool> touched(m, false);
  for (const Edge& e : edges) touched[e.tail] = touched[e.head] = true;
  std::vector<int> isolated;
  for (int v = 0; v < m; ++v)
    if (!touched[v]) isolated.push_back(v);

  if (isolated.empty())
    return {Hyperchain(m, std::move(edges)), std::move(parent)};
  return {DegenerateNetwork{m, std::move(edges), std::move(isolated)}, std::move(parent)};
}

InducedSystem induced_system(const HyperchainSystem& sys, std::span<const int> vertices) {
  InducedSubnetwork sub = induced_subnetwork(sys.graph(), vertices);
  const int m = sub.size();
  Matrix k(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) k(i, j) = sys.K()(sub.parent[i], sub.parent[j]);
  return {std::move(sub), std::move(k)};
}

}  // namespace hyperchain
