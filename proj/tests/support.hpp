#pragma once

// Independent oracles and hand-rolled instance generators for the tests.
// Nothing here calls into the library's algorithms beyond constructing
// the value types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "hyperchain/graph.hpp"

namespace testing {

using hyperchain::Edge;
using hyperchain::Hyperchain;
using hyperchain::HyperchainSystem;
using hyperchain::Matrix;
using hyperchain::RateMatrix;
using hyperchain::Vector;

struct Gen {
  std::mt19937_64 eng;
  explicit Gen(std::uint64_t seed) : eng(seed) {}

  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
  bool coin(double p) { return unit() < p; }
  double log_rate(double lo = 0.1, double hi = 10.0) {
    return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * unit());
  }

  /// Random edge set on n vertices; isolated vertices get an edge to or from
  /// a random partner so the result is always a valid hyperchain.
  Hyperchain graph(int n, double p, double loop_p = 0.0) {
    std::set<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i == j ? coin(loop_p) : coin(p)) edges.insert({i, j});
    for (int v = 0; v < n; ++v) {
      bool touched = false;
      for (auto [a, b] : edges) touched = touched || a == v || b == v;
      if (touched) continue;
      const int u = n == 1 ? 0 : (v + integer(1, n - 1)) % n;
      if (coin(0.5))
        edges.insert({v, u});
      else
        edges.insert({u, v});
    }
    std::vector<Edge> list;
    for (auto [a, b] : edges) list.push_back({a, b});
    return Hyperchain(n, list);
  }

  /// Random Hamiltonian graph: a shuffled n-cycle plus random extra edges.
  Hyperchain hamiltonian(int n, double p) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), eng);
    std::set<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) edges.insert({order[i], order[(i + 1) % n]});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && coin(p)) edges.insert({i, j});
    std::vector<Edge> list;
    for (auto [a, b] : edges) list.push_back({a, b});
    return Hyperchain(n, list);
  }

  RateMatrix rates(const Hyperchain& h, double lo = 0.1, double hi = 10.0) {
    Matrix k = Matrix::Zero(h.size(), h.size());
    for (const Edge& e : h.edges()) k(e.tail, e.head) = log_rate(lo, hi);
    return RateMatrix(k);
  }

  HyperchainSystem system(const Hyperchain& h) { return HyperchainSystem(h, rates(h)); }

  Vector simplex_point(int n) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = -std::log(1.0 - unit());
    return x / x.sum();
  }
};

inline Matrix adjacency_of(const Hyperchain& h) {
  Matrix a = Matrix::Zero(h.size(), h.size());
  for (const Edge& e : h.edges()) a(e.tail, e.head) = 1.0;
  return a;
}

/// Boolean transitive closure (paths of length >= 1).
inline std::vector<std::vector<bool>> reach(const Hyperchain& h) {
  const int n = h.size();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (const Edge& e : h.edges()) r[e.tail][e.head] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (r[i][k] && r[k][j]) r[i][j] = true;
  return r;
}

inline bool oracle_strongly_connected(const Hyperchain& h) {
  const auto r = reach(h);
  for (int i = 0; i < h.size(); ++i)
    for (int j = 0; j < h.size(); ++j)
      if (i != j && !r[i][j]) return false;
  return true;
}

inline bool oracle_acyclic(const Hyperchain& h) {
  const auto r = reach(h);
  for (int i = 0; i < h.size(); ++i)
    if (r[i][i]) return false;
  return true;
}

inline bool oracle_rooted(const Hyperchain& h) {
  std::vector<int> indeg(h.size(), 0);
  for (const Edge& e : h.edges()) ++indeg[e.head];
  return std::count(indeg.begin(), indeg.end(), 0) > 0;
}

/// Every permutation sigma with i -> sigma(i) an edge for all i.
inline std::vector<std::vector<int>> oracle_linear_subgraphs(const Hyperchain& h) {
  const Matrix a = adjacency_of(h);
  std::vector<int> p(h.size());
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    bool ok = true;
    for (int i = 0; i < h.size() && ok; ++i) ok = a(i, p[i]) != 0.0;
    if (ok) out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline int cycle_count(const std::vector<int>& perm) {
  std::vector<bool> seen(perm.size(), false);
  int cycles = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    ++cycles;
    for (std::size_t j = i; !seen[j]; j = perm[j]) seen[j] = true;
  }
  return cycles;
}

inline int even_cycle_count(const std::vector<int>& perm) {
  std::vector<bool> seen(perm.size(), false);
  int even = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (std::size_t j = i; !seen[j]; j = perm[j], ++len) seen[j] = true;
    if (len % 2 == 0) ++even;
  }
  return even;
}

/// Leibniz expansion.
inline double leibniz_det(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  double det = 0.0;
  do {
    double term = (n - cycle_count(p)) % 2 == 0 ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) term *= m(i, p[i]);
    det += term;
  } while (std::next_permutation(p.begin(), p.end()));
  return det;
}

inline bool oracle_hamiltonian(const Hyperchain& h) {
  for (const auto& p : oracle_linear_subgraphs(h))
    if (cycle_count(p) == 1) return true;
  return false;
}

/// x * (K^T x - (x^T K^T x) 1), written out with loops.
inline Vector oracle_replicator(const Matrix& k, const Vector& x) {
  const int n = static_cast<int>(x.size());
  Vector f = Vector::Zero(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) f[j] += k(i, j) * x[i];
  double rho = 0.0;
  for (int j = 0; j < n; ++j) rho += x[j] * f[j];
  Vector g(n);
  for (int j = 0; j < n; ++j) g[j] = x[j] * (f[j] - rho);
  return g;
}

inline Vector oracle_absolute(const Matrix& k, const Vector& x) {
  const int n = static_cast<int>(x.size());
  Vector g = Vector::Zero(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g[j] += x[j] * k(i, j) * x[i];
  return g;
}

/// Central differences of oracle_replicator.
inline Matrix fd_jacobian(const Matrix& k, const Vector& z, double h = 1e-6) {
  const int n = static_cast<int>(z.size());
  Matrix j(n, n);
  for (int c = 0; c < n; ++c) {
    Vector zp = z, zm = z;
    zp[c] += h;
    zm[c] -= h;
    j.col(c) = (oracle_replicator(k, zp) - oracle_replicator(k, zm)) / (2.0 * h);
  }
  return j;
}

/// Classical fixed-step RK4 in plain coordinates; returns the state at t_end.
template <class F>
Vector rk4(F&& f, Vector x, double t_end, int steps) {
  const double h = t_end / steps;
  for (int s = 0; s < steps; ++s) {
    const Vector k1 = f(x);
    const Vector k2 = f(x + 0.5 * h * k1);
    const Vector k3 = f(x + 0.5 * h * k2);
    const Vector k4 = f(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

/// Same, recording every state (including x0).
template <class F>
std::vector<Vector> rk4_path(F&& f, Vector x, double t_end, int steps) {
  const double h = t_end / steps;
  std::vector<Vector> path{x};
  for (int s = 0; s < steps; ++s) {
    const Vector k1 = f(x);
    const Vector k2 = f(x + 0.5 * h * k1);
    const Vector k3 = f(x + 0.5 * h * k2);
    const Vector k4 = f(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    path.push_back(x);
  }
  return path;
}

inline double point_to_polyline(const Vector& p, const std::vector<Vector>& line) {
  double best = (p - line.front()).norm();
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    const Vector d = line[i + 1] - line[i];
    const double len2 = d.squaredNorm();
    const double t = len2 == 0.0 ? 0.0 : std::clamp((p - line[i]).dot(d) / len2, 0.0, 1.0);
    best = std::min(best, (p - line[i] - t * d).norm());
  }
  return best;
}

/// Symmetric Hausdorff distance between two polylines (vertex-to-segment).
inline double hausdorff(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  double d = 0.0;
  for (const Vector& p : a) d = std::max(d, point_to_polyline(p, b));
  for (const Vector& p : b) d = std::max(d, point_to_polyline(p, a));
  return d;
}

/// Eigenvalues of (1/n) P for the cyclic shift P: exp(2 pi i k / n) / n.
inline std::vector<std::complex<double>> circulant_spectrum(int n) {
  std::vector<std::complex<double>> out;
  for (int k = 0; k < n; ++k) out.push_back(std::polar(1.0 / n, 2.0 * M_PI * k / n));
  return out;
}

/// Greedy multiset comparison: every value of a has a distinct partner in b within tol.
inline bool same_multiset(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b, double tol) {
  if (a.size() != b.size()) return false;
  for (const auto& x : a) {
    auto best = b.end();
    double dist = tol;
    for (auto it = b.begin(); it != b.end(); ++it)
      if (std::abs(*it - x) <= dist) {
        dist = std::abs(*it - x);
        best = it;
      }
    if (best == b.end()) return false;
    b.erase(best);
  }
  return true;
}

inline Hyperchain chain(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return Hyperchain(n, e);
}

inline Hyperchain from_pairs(int n, std::initializer_list<std::pair<int, int>> one_based) {
  std::vector<Edge> e;
  for (auto [a, b] : one_based) e.push_back({a - 1, b - 1});
  return Hyperchain(n, e);
}

}  // namespace testing
