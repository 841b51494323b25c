#include <doctest.h>

#include "hyperchain/generators.hpp"
#include "hyperchain/graph_analysis.hpp"
#include "support.hpp"

using namespace hyperchain;
using testing::from_pairs;

namespace {

// The three motifs with m = n = 3. Vertices: X1 X2 X3 = 1 2 3, Y1 Y2 Y3 = 4 5 6, Z = 7.
Hyperchain motif_left() { return from_pairs(6, {{1, 2}, {2, 3}, {3, 1}, {1, 4}, {4, 5}, {5, 6}, {6, 1}}); }
Hyperchain motif_middle() { return from_pairs(6, {{1, 2}, {2, 3}, {3, 1}, {1, 4}, {4, 5}, {5, 6}, {6, 4}}); }
Hyperchain motif_right() { return from_pairs(6, {{1, 2}, {2, 3}, {3, 1}, {1, 6}, {6, 4}, {4, 5}, {5, 4}}); }

}  // namespace

TEST_CASE("initial and terminal nodes") {
  const NodeClasses chain = initial_and_terminal_nodes(testing::chain(3));
  CHECK(chain.initial == std::vector<int>{0});
  CHECK(chain.terminal == std::vector<int>{2});
  const NodeClasses cyc = initial_and_terminal_nodes(cycle_graph(5));
  CHECK(cyc.initial.empty());
  CHECK(cyc.terminal.empty());
  const NodeClasses loop = initial_and_terminal_nodes(cycle_graph(1));
  CHECK(loop.initial.empty());
  CHECK(loop.terminal.empty());
}

TEST_CASE("strong connectivity and acyclicity") {
  CHECK(is_strongly_connected(example_six().graph()));
  CHECK_FALSE(is_strongly_connected(testing::chain(3)));
  CHECK_FALSE(is_strongly_connected(from_pairs(4, {{1, 2}, {2, 1}, {3, 4}, {4, 3}, {2, 3}})));
  CHECK(is_strongly_connected(cycle_graph(1)));

  CHECK(is_acyclic(testing::chain(3)));
  CHECK_FALSE(is_acyclic(from_pairs(2, {{1, 2}, {2, 2}})));
  CHECK_FALSE(is_acyclic(example_six().graph()));

  testing::Gen gen(21);
  for (int trial = 0; trial < 300; ++trial) {
    const Hyperchain h = gen.graph(gen.integer(1, 7), gen.unit() * 0.5, 0.1);
    CHECK(is_strongly_connected(h) == testing::oracle_strongly_connected(h));
    CHECK(is_acyclic(h) == testing::oracle_acyclic(h));
    CHECK(is_rooted(h) == testing::oracle_rooted(h));
  }
}

TEST_CASE("spanning linear subgraphs of the worked examples") {
  CHECK_FALSE(has_spanning_linear_subgraph(motif_left()));
  CHECK(has_spanning_linear_subgraph(motif_middle()));
  CHECK_FALSE(has_spanning_linear_subgraph(motif_right()));
  CHECK(enumerate_spanning_linear_subgraphs(motif_middle()).size() == 1);
  CHECK(has_spanning_linear_subgraph(cycle_graph(7)));
  CHECK_FALSE(has_spanning_linear_subgraph(testing::chain(3)));

  const auto five = enumerate_spanning_linear_subgraphs(example_five(0.5, 2.0).graph());
  REQUIRE(five.size() == 2);
  int odd = 0;
  for (const LinearSubgraph& d : five) {
    if (d.cycles.size() == 1) {
      CHECK(d.cycles[0].size() == 5);
      CHECK(d.even_cycle_count() == 0);
      CHECK(d.parity == Parity::Even);
    } else {
      REQUIRE(d.cycles.size() == 2);
      CHECK(d.even_cycle_count() == 1);
      CHECK(d.parity == Parity::Odd);
      ++odd;
    }
  }
  CHECK(odd == 1);
  CHECK_FALSE(same_parity(five));

  const auto four = enumerate_spanning_linear_subgraphs(cycle_graph(4));
  REQUIRE(four.size() == 1);
  CHECK(four[0].parity == Parity::Odd);
  CHECK(enumerate_spanning_linear_subgraphs(testing::chain(3)).empty());
}

TEST_CASE("enumeration bound") {
  const Hyperchain big = cycle_graph(kEnumerationBound + 1);
  CHECK_THROWS_AS(enumerate_spanning_linear_subgraphs(big), Error);
  CHECK(enumerate_spanning_linear_subgraphs(big, 5).size() == 1);
}

TEST_CASE("matching decision agrees with permutation enumeration") {
  testing::Gen gen(7);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = gen.integer(1, 7);
    const Hyperchain h = gen.graph(n, 0.15 + 0.3 * gen.unit(), 0.15);
    const auto brute = testing::oracle_linear_subgraphs(h);
    CHECK(has_spanning_linear_subgraph(h) == !brute.empty());
    const auto listed = enumerate_spanning_linear_subgraphs(h);
    REQUIRE(listed.size() == brute.size());
    for (std::size_t i = 0; i < listed.size(); ++i) {
      CHECK(listed[i].successor == brute[i]);  // both lexicographic
      CHECK((listed[i].parity == Parity::Odd) == (testing::even_cycle_count(brute[i]) % 2 == 1));
    }
    if (auto d = find_spanning_linear_subgraph(h)) {
      for (const Edge& e : d->edges()) CHECK(h.has_edge(e.tail, e.head));
    }
  }
}

TEST_CASE("Harary expansion of det A over spanning linear subgraphs") {
  testing::Gen gen(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Hyperchain h = gen.graph(gen.integer(1, 6), 0.4, 0.2);
    double expansion = 0.0;
    for (const LinearSubgraph& d : enumerate_spanning_linear_subgraphs(h))
      expansion += d.parity == Parity::Even ? 1.0 : -1.0;
    CHECK(expansion == doctest::Approx(testing::leibniz_det(h.adjacency())));
    CHECK(h.adjacency().determinant() == doctest::Approx(expansion).epsilon(1e-9));
  }
}

TEST_CASE("linear subgraph parity bookkeeping") {
  const LinearSubgraph d = make_linear_subgraph({1, 0, 3, 2});
  CHECK(d.cycles.size() == 2);
  CHECK(d.even_cycle_count() == 2);
  CHECK(d.parity == Parity::Even);
  const LinearSubgraph loop = make_linear_subgraph({0, 2, 1});
  CHECK(loop.even_cycle_count() == 1);
  CHECK(loop.parity == Parity::Odd);
  CHECK_THROWS_AS(make_linear_subgraph({1, 1, 0}), Error);
}

TEST_CASE("Hamiltonian cycles") {
  const HamiltonianSearch c5 = find_hamiltonian_cycle(cycle_graph(5));
  REQUIRE(c5.status == SearchStatus::Found);
  CHECK(c5.cycle == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(find_hamiltonian_cycle(example_six().graph()).status == SearchStatus::Absent);
  const Hyperchain k3 = from_pairs(3, {{1, 2}, {1, 3}, {2, 1}, {2, 3}, {3, 1}, {3, 2}});
  const HamiltonianSearch c3 = find_hamiltonian_cycle(k3);
  REQUIRE(c3.status == SearchStatus::Found);
  CHECK(c3.cycle == std::vector<int>{0, 1, 2});

  testing::Gen gen(9);
  for (int trial = 0; trial < 200; ++trial) {
    const Hyperchain h = gen.graph(gen.integer(1, 7), 0.35, 0.1);
    const HamiltonianSearch s = find_hamiltonian_cycle(h);
    CHECK((s.status == SearchStatus::Found) == testing::oracle_hamiltonian(h));
    if (s.status != SearchStatus::Found) continue;
    REQUIRE(static_cast<int>(s.cycle.size()) == h.size());
    std::vector<int> succ(h.size());
    for (int i = 0; i < h.size(); ++i) {
      const int a = s.cycle[i], b = s.cycle[(i + 1) % h.size()];
      CHECK(h.has_edge(a, b));
      succ[a] = b;
    }
    const LinearSubgraph d = make_linear_subgraph(succ);
    CHECK(d.cycles.size() == 1);
    CHECK(is_strongly_connected(h));
    CHECK(has_spanning_linear_subgraph(h));
  }
}

TEST_CASE("cycle graphs") {
  CHECK(is_cycle_graph(cycle_graph(6)));
  CHECK(is_cycle_graph(cycle_graph(1)));
  CHECK_FALSE(is_cycle_graph(from_pairs(3, {{1, 2}, {2, 3}, {3, 1}, {1, 3}})));
  CHECK_FALSE(is_cycle_graph(example_six().graph()));
  CHECK_FALSE(is_cycle_graph(from_pairs(4, {{1, 2}, {2, 1}, {3, 4}, {4, 3}})));

  testing::Gen gen(10);
  for (int trial = 0; trial < 100; ++trial) {
    const Hyperchain h = gen.graph(gen.integer(1, 6), 0.3, 0.1);
    if (!is_cycle_graph(h)) continue;
    const HamiltonianSearch s = find_hamiltonian_cycle(h);
    REQUIRE(s.status == SearchStatus::Found);
    CHECK(h.edge_count() == static_cast<std::size_t>(h.size()));
  }
}

TEST_CASE("linear digraph adjacency identities") {
  for (int n = 1; n <= 8; ++n) CHECK(linear_digraph_adjacency_checks(cycle_graph(n)));
  CHECK(linear_digraph_adjacency_checks(from_pairs(4, {{1, 2}, {2, 1}, {3, 4}, {4, 3}})));
  CHECK_THROWS_AS(linear_digraph_adjacency_checks(testing::chain(3)), Error);
  try {
    linear_digraph_adjacency_checks(testing::chain(3));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotLinear);
  }
}

TEST_CASE("profile invariants") {
  testing::Gen gen(12);
  for (int trial = 0; trial < 200; ++trial) {
    const Hyperchain h = gen.graph(gen.integer(1, 7), 0.3, 0.1);
    const GraphProfile p = profile_graph(h);
    if (p.is_cycle_graph) CHECK(p.hamiltonian);
    if (p.hamiltonian) CHECK((p.strongly_connected && p.has_spanning_linear_subgraph));
    if (p.acyclic) CHECK((p.is_rooted && !p.has_spanning_linear_subgraph));
    REQUIRE(p.spanning_linear_subgraphs);
    CHECK(p.spanning_linear_subgraphs->empty() == !p.has_spanning_linear_subgraph);
  }
}

TEST_CASE("Hopcroft-Karp matching size") {
  // Left i may take right i or i + 1: a perfect matching exists.
  std::vector<std::vector<int>> adj(5);
  for (int i = 0; i < 5; ++i) adj[i] = {i, std::min(i + 1, 4)};
  const std::vector<int> m = maximum_bipartite_matching(5, 5, adj);
  CHECK(std::count(m.begin(), m.end(), -1) == 0);
  // Three left vertices competing for two right vertices.
  const std::vector<int> partial = maximum_bipartite_matching(3, 2, {{0, 1}, {0}, {1}});
  CHECK(std::count(partial.begin(), partial.end(), -1) == 1);
}
