#include "hyperchain/graph_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

namespace hyperchain {

std::vector<int> maximum_bipartite_matching(int left_count, int right_count,
                                            const std::vector<std::vector<int>>& adjacency) {
  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<int> match_left(left_count, -1), match_right(right_count, -1);
  std::vector<int> dist(left_count);

  auto bfs = [&] {
    std::queue<int> q;
    bool found = false;
    for (int u = 0; u < left_count; ++u) {
      if (match_left[u] < 0) {
        dist[u] = 0;
        q.push(u);
      } else {
        dist[u] = kInf;
      }
    }
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adjacency[u]) {
        const int w = match_right[v];
        if (w < 0) {
          found = true;
        } else if (dist[w] == kInf) {
          dist[w] = dist[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  };

  // Recursion depth is bounded by the number of layers, at most left_count.
  auto dfs = [&](auto&& self, int u) -> bool {
    for (int v : adjacency[u]) {
      const int w = match_right[v];
      if (w < 0 || (dist[w] == dist[u] + 1 && self(self, w))) {
        match_left[u] = v;
        match_right[v] = u;
        return true;
      }
    }
    dist[u] = kInf;
    return false;
  };

  while (bfs()) {
    for (int u = 0; u < left_count; ++u)
      if (match_left[u] < 0) dfs(dfs, u);
  }
  return match_left;
}

std::vector<Edge> LinearSubgraph::edges() const {
  std::vector<Edge> out;
  out.reserve(successor.size());
  for (int v = 0; v < static_cast<int>(successor.size()); ++v) out.push_back({v, successor[v]});
  return out;
}

int LinearSubgraph::even_cycle_count() const {
  return static_cast<int>(
      std::count_if(cycles.begin(), cycles.end(), [](const auto& c) { return c.size() % 2 == 0; }));
}

LinearSubgraph make_linear_subgraph(std::vector<int> successor) {
  const int n = static_cast<int>(successor.size());
  std::vector<int> hits(n, 0);
  for (int s : successor) {
    if (s < 0 || s >= n) throw Error(ErrorCode::NotLinear, "successor index out of range");
    if (++hits[s] > 1) throw Error(ErrorCode::NotLinear, "vertex has indegree above one");
  }
  LinearSubgraph d;
  std::vector<bool> seen(n, false);
  for (int start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<int> cycle;
    for (int v = start; !seen[v]; v = successor[v]) {
      seen[v] = true;
      cycle.push_back(v);
    }
    d.cycles.push_back(std::move(cycle));
  }
  d.successor = std::move(successor);
  d.parity = d.even_cycle_count() % 2 == 0 ? Parity::Even : Parity::Odd;
  return d;
}

NodeClasses initial_and_terminal_nodes(const Hyperchain& h) {
  NodeClasses out;
  for (int v = 0; v < h.size(); ++v) {
    if (h.indegree(v) == 0) out.initial.push_back(v);
    if (h.outdegree(v) == 0) out.terminal.push_back(v);
  }
  return out;
}

bool is_rooted(const Hyperchain& h) {
  for (int v = 0; v < h.size(); ++v)
    if (h.indegree(v) == 0) return true;
  return false;
}

namespace {

int reach_count(const Hyperchain& h, bool forward) {
  std::vector<bool> seen(h.size(), false);
  std::vector<int> stack{0};
  seen[0] = true;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : forward ? h.out_neighbors(v) : h.in_neighbors(v)) {
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count;
}

}  // namespace

bool is_strongly_connected(const Hyperchain& h) {
  return reach_count(h, true) == h.size() && reach_count(h, false) == h.size();
}

bool is_acyclic(const Hyperchain& h) {
  std::vector<int> indeg(h.size());
  for (int v = 0; v < h.size(); ++v) indeg[v] = h.indegree(v);
  std::vector<int> ready;
  for (int v = 0; v < h.size(); ++v)
    if (indeg[v] == 0) ready.push_back(v);
  int removed = 0;
  while (!ready.empty()) {
    const int v = ready.back();
    ready.pop_back();
    ++removed;
    for (int w : h.out_neighbors(v))
      if (--indeg[w] == 0) ready.push_back(w);
  }
  return removed == h.size();
}

std::optional<LinearSubgraph> find_spanning_linear_subgraph(const Hyperchain& h) {
  std::vector<std::vector<int>> adjacency(h.size());
  for (int v = 0; v < h.size(); ++v) adjacency[v] = h.out_neighbors(v);
  std::vector<int> match = maximum_bipartite_matching(h.size(), h.size(), adjacency);
  if (std::find(match.begin(), match.end(), -1) != match.end()) return std::nullopt;
  return make_linear_subgraph(std::move(match));
}

bool has_spanning_linear_subgraph(const Hyperchain& h) {
  return find_spanning_linear_subgraph(h).has_value();
}

std::vector<LinearSubgraph> enumerate_spanning_linear_subgraphs(const Hyperchain& h,
                                                                std::optional<std::size_t> cap) {
  const int n = h.size();
  if (n > kEnumerationBound && !cap)
    throw Error(ErrorCode::TooLarge, "enumeration over " + std::to_string(n) +
                                         " species exceeds bound " +
                                         std::to_string(kEnumerationBound));
  std::vector<LinearSubgraph> found;
  std::vector<int> successor(n, -1);
  std::vector<bool> head_used(n, false);
  const std::size_t limit = cap.value_or(std::numeric_limits<std::size_t>::max());

  auto recurse = [&](auto&& self, int v) -> void {
    if (found.size() >= limit) return;
    if (v == n) {
      found.push_back(make_linear_subgraph(successor));
      return;
    }
    for (int w : h.out_neighbors(v)) {
      if (head_used[w]) continue;
      head_used[w] = true;
      successor[v] = w;
      self(self, v + 1);
      head_used[w] = false;
      if (found.size() >= limit) return;
    }
  };
  recurse(recurse, 0);
  return found;
}

bool same_parity(const std::vector<LinearSubgraph>& subgraphs) {
  return std::all_of(subgraphs.begin(), subgraphs.end(),
                     [&](const LinearSubgraph& d) { return d.parity == subgraphs.front().parity; });
}

HamiltonianSearch find_hamiltonian_cycle(const Hyperchain& h, std::uint64_t node_budget) {
  const int n = h.size();
  if (n > kHamiltonianBound)
    throw Error(ErrorCode::TooLarge, "Hamiltonian search over " + std::to_string(n) +
                                         " species exceeds bound " +
                                         std::to_string(kHamiltonianBound));
  HamiltonianSearch result;
  if (n == 1) {
    if (h.has_edge(0, 0)) {
      result.status = SearchStatus::Found;
      result.cycle = {0};
    }
    return result;
  }

  // Self-loops never belong to a Hamiltonian cycle on two or more vertices.
  std::vector<std::vector<int>> out(n), in(n);
  for (const Edge& e : h.edges()) {
    if (e.tail == e.head) continue;
    out[e.tail].push_back(e.head);
    in[e.head].push_back(e.tail);
  }
  for (int v = 0; v < n; ++v)
    if (out[v].empty() || in[v].empty()) return result;
  if (!is_strongly_connected(h)) return result;

  std::vector<bool> visited(n, false);
  std::vector<int> path{0};
  visited[0] = true;
  bool exhausted = false;

  // Every unvisited vertex must keep a possible predecessor (an unvisited
  // vertex or the path end) and a possible successor (unvisited or the start).
  auto feasible = [&](int end) {
    for (int u = 0; u < n; ++u) {
      if (visited[u]) continue;
      bool pred = false, succ = false;
      for (int p : in[u])
        if (p == end || !visited[p]) { pred = true; break; }
      for (int s : out[u])
        if (s == 0 || !visited[s]) { succ = true; break; }
      if (!pred || !succ) return false;
    }
    return true;
  };

  auto recurse = [&](auto&& self, int v) -> bool {
    if (++result.nodes_visited > node_budget) {
      exhausted = true;
      return false;
    }
    if (static_cast<int>(path.size()) == n) return h.has_edge(v, 0);
    if (!feasible(v)) return false;
    for (int w : out[v]) {
      if (visited[w]) continue;
      visited[w] = true;
      path.push_back(w);
      if (self(self, w)) return true;
      path.pop_back();
      visited[w] = false;
      if (exhausted) return false;
    }
    return false;
  };

  if (recurse(recurse, 0)) {
    result.status = SearchStatus::Found;
    result.cycle = path;
  } else {
    result.status = exhausted ? SearchStatus::Inconclusive : SearchStatus::Absent;
  }
  return result;
}

bool is_cycle_graph(const Hyperchain& h) {
  if (static_cast<int>(h.edge_count()) != h.size()) return false;
  for (int v = 0; v < h.size(); ++v)
    if (h.outdegree(v) != 1 || h.indegree(v) != 1) return false;
  return is_strongly_connected(h);
}

bool linear_digraph_adjacency_checks(const LinearSubgraph& d) {
  const int n = static_cast<int>(d.successor.size());
  Matrix a = Matrix::Zero(n, n);
  for (int v = 0; v < n; ++v) a(v, d.successor[v]) = 1.0;
  const Vector ones = Vector::Ones(n);
  if ((a.transpose() * ones - ones).cwiseAbs().maxCoeff() > 0.0) return false;
  for (int i = 0; i < n; ++i) {
    const Vector image = a.transpose() * Vector::Unit(n, i);
    if ((image - Vector::Unit(n, d.successor[i])).cwiseAbs().maxCoeff() > 0.0) return false;
  }
  return true;
}

bool linear_digraph_adjacency_checks(const Hyperchain& d) {
  std::vector<int> successor(d.size(), -1);
  for (int v = 0; v < d.size(); ++v) {
    if (d.outdegree(v) != 1 || d.indegree(v) != 1)
      throw Error(ErrorCode::NotLinear,
                  "vertex " + std::to_string(v + 1) + " does not have in- and outdegree 1");
    successor[v] = d.out_neighbors(v).front();
  }
  return linear_digraph_adjacency_checks(make_linear_subgraph(std::move(successor)));
}

GraphProfile profile_graph(const Hyperchain& h) {
  GraphProfile p;
  auto nodes = initial_and_terminal_nodes(h);
  p.initial_nodes = std::move(nodes.initial);
  p.terminal_nodes = std::move(nodes.terminal);
  p.is_rooted = !p.initial_nodes.empty();
  p.strongly_connected = is_strongly_connected(h);
  p.acyclic = is_acyclic(h);
  p.has_spanning_linear_subgraph = has_spanning_linear_subgraph(h);
  p.is_cycle_graph = is_cycle_graph(h);
  if (h.size() <= kHamiltonianBound) {
    HamiltonianSearch search = find_hamiltonian_cycle(h);
    p.hamiltonian_search = search.status;
    p.hamiltonian = search.status == SearchStatus::Found;
    p.hamiltonian_cycle = std::move(search.cycle);
  } else {
    p.hamiltonian_search = SearchStatus::Inconclusive;
  }
  if (h.size() <= kEnumerationBound) {
    auto all = enumerate_spanning_linear_subgraphs(h, kProfileEnumerationCap + 1);
    p.enumeration_truncated = all.size() > kProfileEnumerationCap;
    if (p.enumeration_truncated) all.resize(kProfileEnumerationCap);
    p.spanning_linear_subgraphs = std::move(all);
  }
  return p;
}

std::string_view to_string(Parity parity) { return parity == Parity::Even ? "Even" : "Odd"; }

std::string_view to_string(SearchStatus status) {
  switch (status) {
    case SearchStatus::Found: return "Found";
    case SearchStatus::Absent: return "Absent";
    case SearchStatus::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

namespace {

std::vector<int> one_based(const std::vector<int>& vs) {
  std::vector<int> out(vs);
  for (int& v : out) ++v;
  return out;
}

}  // namespace

nlohmann::json to_json(const LinearSubgraph& d) {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : d.edges()) edges.push_back({e.tail + 1, e.head + 1});
  nlohmann::json cycles = nlohmann::json::array();
  for (const auto& c : d.cycles) cycles.push_back(one_based(c));
  return {{"edges", std::move(edges)},
          {"cycles", std::move(cycles)},
          {"even_cycles", d.even_cycle_count()},
          {"parity", to_string(d.parity)}};
}

nlohmann::json to_json(const GraphProfile& p) {
  nlohmann::json j = {
      {"initial_nodes", one_based(p.initial_nodes)},
      {"terminal_nodes", one_based(p.terminal_nodes)},
      {"is_rooted", p.is_rooted},
      {"strongly_connected", p.strongly_connected},
      {"acyclic", p.acyclic},
      {"has_spanning_linear_subgraph", p.has_spanning_linear_subgraph},
      {"hamiltonian", p.hamiltonian},
      {"hamiltonian_search", to_string(p.hamiltonian_search)},
      {"hamiltonian_cycle", one_based(p.hamiltonian_cycle)},
      {"is_cycle_graph", p.is_cycle_graph},
  };
  if (p.spanning_linear_subgraphs) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& d : *p.spanning_linear_subgraphs) list.push_back(to_json(d));
    j["spanning_linear_subgraphs"] = std::move(list);
    j["enumeration_truncated"] = p.enumeration_truncated;
  } else {
    j["spanning_linear_subgraphs"] = nullptr;
  }
  return j;
}

}  // namespace hyperchain
