#include "hyperchain/generators.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace hyperchain {

Hyperchain cycle_graph(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "cycle needs at least one species");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
  return Hyperchain(n, std::move(edges));
}

Hyperchain hamiltonian_plus_chords(int n, int chords, Rng& rng, bool allow_self_loops) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "Hamiltonian graph with chords needs n >= 2");
  std::vector<Edge> candidates;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != (i + 1) % n && (i != j || allow_self_loops)) candidates.push_back({i, j});
  if (chords < 0 || chords > static_cast<int>(candidates.size()))
    throw Error(ErrorCode::InvalidArgument, "chord count must be between 0 and " +
                                                std::to_string(candidates.size()));
  // Partial Fisher-Yates: the first `chords` entries become a uniform sample.
  for (int i = 0; i < chords; ++i) {
    const int j = uniform_int(rng, i, static_cast<int>(candidates.size()) - 1);
    std::swap(candidates[i], candidates[j]);
  }
  const Hyperchain cycle = cycle_graph(n);
  std::vector<Edge> edges(cycle.edges().begin(), cycle.edges().end());
  edges.insert(edges.end(), candidates.begin(), candidates.begin() + chords);
  return Hyperchain(n, std::move(edges));
}

Hyperchain random_hyperchain(int n, double p, Rng& rng, double loop_p) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "random graph needs at least one species");
  std::vector<Edge> edges;
  std::vector<bool> touched(n, false);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (bernoulli(rng, i == j ? loop_p : p)) {
        edges.push_back({i, j});
        touched[i] = touched[j] = true;
      }
  for (int v = 0; v < n; ++v) {
    if (touched[v]) continue;
    int w = n == 1 ? v : uniform_int(rng, 0, n - 2);
    if (n > 1 && w >= v) ++w;
    if (bernoulli(rng, 0.5))
      edges.push_back({v, w});
    else
      edges.push_back({w, v});
    touched[v] = touched[w] = true;
  }
  return Hyperchain(n, std::move(edges));
}

Hyperchain shuffle_labels(const Hyperchain& h, Rng& rng) {
  std::vector<int> perm(h.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = h.size() - 1; i > 0; --i) std::swap(perm[i], perm[uniform_int(rng, 0, i)]);
  std::vector<Edge> edges;
  for (const Edge& e : h.edges()) edges.push_back({perm[e.tail], perm[e.head]});
  return Hyperchain(h.size(), std::move(edges));
}

RateMatrix random_rates(const Hyperchain& h, Rng& rng, double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo)) throw Error(ErrorCode::InvalidArgument, "rate range must satisfy 0 < lo <= hi");
  Matrix k = Matrix::Zero(h.size(), h.size());
  for (const Edge& e : h.edges()) k(e.tail, e.head) = log_uniform(rng, lo, hi);
  return RateMatrix(std::move(k));
}

HyperchainSystem random_system(const Hyperchain& h, Rng& rng, double lo, double hi) {
  RateMatrix k = random_rates(h, rng, lo, hi);
  return HyperchainSystem(h, std::move(k));
}

namespace {

HyperchainSystem labelled_system(int n, std::initializer_list<std::tuple<int, int, double>> edges) {
  std::vector<Edge> list;
  Matrix k = Matrix::Zero(n, n);
  for (auto [tail, head, rate] : edges) {
    list.push_back({tail - 1, head - 1});
    k(tail - 1, head - 1) = rate;
  }
  return HyperchainSystem(Hyperchain(n, std::move(list)), RateMatrix(std::move(k)));
}

}  // namespace

HyperchainSystem example_five(double k3, double k5) {
  if (!(k3 > 0.0) || !(k5 > 0.0)) throw Error(ErrorCode::InvalidRate, "k3 and k5 must be positive");
  return labelled_system(5, {{3, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 4, k3},
                             {4, 5, 1.0}, {5, 4, k5}, {5, 1, 1.0}});
}

HyperchainSystem example_six() {
  return labelled_system(6, {{1, 2, 1.0}, {2, 1, 2.0}, {2, 3, 3.0}, {3, 4, 1.0}, {4, 3, 1.0},
                             {4, 5, 3.0}, {5, 6, 2.0}, {6, 5, 1.0}, {6, 2, 3.0}, {5, 1, 1.0}});
}

}  // namespace hyperchain
