#include <doctest.h>

#include "hyperchain/generators.hpp"
#include "hyperchain/network_io.hpp"
#include "support.hpp"

using namespace hyperchain;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("new_hyperchain validates its input") {
  const std::vector<std::pair<int, int>> two{{1, 2}, {2, 1}};
  const Hyperchain h2 = new_hyperchain(2, two);
  CHECK(h2.size() == 2);
  CHECK(h2.edge_count() == 2);

  const Hyperchain h6 = cycle_graph(6);
  CHECK(h6.edge_count() == 6);
  for (int i = 0; i < 6; ++i) CHECK(h6.has_edge(i, (i + 1) % 6));

  const std::vector<std::pair<int, int>> lonely{{1, 2}};
  CHECK(code_of([&] { new_hyperchain(3, lonely); }) == ErrorCode::IsolatedVertex);
  CHECK(code_of([&] { new_hyperchain(2, std::vector<std::pair<int, int>>{}); }) == ErrorCode::EmptyEdgeSet);
  const std::vector<std::pair<int, int>> far{{1, 4}};
  CHECK(code_of([&] { new_hyperchain(2, far); }) == ErrorCode::IndexOutOfRange);
  const std::vector<std::pair<int, int>> dup{{1, 2}, {2, 1}, {1, 2}};
  CHECK(code_of([&] { new_hyperchain(2, dup); }) == ErrorCode::DuplicateEdge);

  try {
    new_hyperchain(3, lonely);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("vertex 3") != std::string::npos);
  }
}

TEST_CASE("self-loops are ordinary edges") {
  const std::vector<std::pair<int, int>> loop{{1, 1}};
  const Hyperchain h = new_hyperchain(1, loop);
  CHECK(h.adjacency() == Matrix::Ones(1, 1));
  CHECK(h.indegree(0) == 1);
  CHECK(h.outdegree(0) == 1);
}

TEST_CASE("adjacency matrix") {
  Matrix a2(2, 2);
  a2 << 0, 1, 1, 0;
  CHECK(cycle_graph(2).adjacency() == a2);
  Matrix a3 = Matrix::Zero(3, 3);
  a3(0, 1) = a3(1, 2) = a3(2, 0) = 1;
  CHECK(cycle_graph(3).adjacency() == a3);
}

TEST_CASE("adjacency round trip on random graphs") {
  testing::Gen gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Hyperchain h = gen.graph(gen.integer(1, 7), 0.3, 0.2);
    const Matrix a = h.adjacency();
    std::vector<Edge> edges;
    for (int i = 0; i < h.size(); ++i)
      for (int j = 0; j < h.size(); ++j)
        if (a(i, j) != 0.0) edges.push_back({i, j});
    CHECK(Hyperchain(h.size(), edges) == h);
    CHECK(a == testing::adjacency_of(h));
  }
}

TEST_CASE("systems check rate support") {
  const Hyperchain h = cycle_graph(3);
  Matrix k = h.adjacency();
  CHECK_NOTHROW(HyperchainSystem(h, RateMatrix(k)));
  k(0, 1) = 0.0;
  CHECK(code_of([&] { HyperchainSystem(h, RateMatrix(k)); }) == ErrorCode::SupportMismatch);
  k = h.adjacency();
  k(0, 2) = 0.5;
  CHECK(code_of([&] { HyperchainSystem(h, RateMatrix(k)); }) == ErrorCode::SupportMismatch);
  k = h.adjacency();
  k(0, 1) = -1.0;
  CHECK(code_of([&] { RateMatrix{k}; }) == ErrorCode::InvalidRate);
}

TEST_CASE("restrict_rates") {
  const HyperchainSystem five = example_five(0.5, 2.0);
  CHECK(restrict_rates(five.rates(), five.graph()).entries() == five.K());

  // H1: the 5-cycle 1 -> 2 -> 3 -> 4 -> 5 -> 1.
  const Hyperchain h1 = testing::from_pairs(5, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 1}});
  const Matrix r = restrict_rates(five.rates(), h1).entries();
  CHECK((r.array() != 0.0).count() == 5);
  CHECK(r(2, 3) == 0.5);
  CHECK(r(0, 1) == 1.0);

  const HyperchainSystem six = example_six();
  // A lone 2-cycle on six vertices leaves four isolated, so the restriction
  // to the cycle {1, 2} goes through the induced pair.
  const InducedSystem induced = induced_system(six, std::vector<int>{0, 1});
  Matrix expect(2, 2);
  expect << 0, 1, 2, 0;
  CHECK(induced.rates == expect);

  const Hyperchain not_sub = testing::from_pairs(3, {{1, 3}, {3, 2}, {2, 1}});
  CHECK(code_of([&] { restrict_rates(RateMatrix(cycle_graph(3).adjacency()), not_sub); }) ==
        ErrorCode::NotASubgraph);
}

TEST_CASE("induced subnetworks") {
  const InducedSubnetwork s = induced_subnetwork(cycle_graph(3), std::vector<int>{0, 1});
  REQUIRE_FALSE(s.degenerate());
  const Hyperchain& h = std::get<Hyperchain>(s.network);
  CHECK(h.size() == 2);
  CHECK(h.edge_count() == 1);
  CHECK(h.has_edge(0, 1));
  CHECK(s.parent == std::vector<int>{0, 1});

  const InducedSystem five = induced_system(example_five(0.5, 2.0), std::vector<int>{3, 4});
  Matrix expect(2, 2);
  expect << 0, 1, 2, 0;
  CHECK(five.rates == expect);

  // Induced on {1, 3} of the 3-cycle keeps only 3 -> 1 and leaves nothing isolated.
  const InducedSubnetwork t = induced_subnetwork(cycle_graph(3), std::vector<int>{0, 2});
  CHECK_FALSE(t.degenerate());
  CHECK(t.parent == std::vector<int>{0, 2});

  // Induced on {1, 3} of the chain 1 -> 2 -> 3 has no edges at all.
  const InducedSubnetwork d = induced_subnetwork(testing::chain(3), std::vector<int>{0, 2});
  REQUIRE(d.degenerate());
  CHECK(std::get<DegenerateNetwork>(d.network).isolated == std::vector<int>{0, 1});

  CHECK(code_of([] { induced_subnetwork(cycle_graph(3), std::vector<int>{}); }) == ErrorCode::EmptySubset);

  testing::Gen gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Hyperchain g = gen.graph(gen.integer(1, 6), 0.4, 0.1);
    std::vector<int> all(g.size());
    std::iota(all.begin(), all.end(), 0);
    const InducedSubnetwork full = induced_subnetwork(g, all);
    REQUIRE_FALSE(full.degenerate());
    CHECK(std::get<Hyperchain>(full.network) == g);
  }
}

TEST_CASE("text and JSON network formats") {
  const HyperchainSystem six = example_six();
  const std::string text = format_network_text(six, "six");
  const HyperchainSystem back = parse_network(text);
  CHECK(back.graph() == six.graph());
  CHECK(back.K() == six.K());
  const HyperchainSystem from_json = parse_network(network_to_json(six).dump());
  CHECK(from_json.K() == six.K());

  const HyperchainSystem sys = parse_network("# comment\n\nn 2  # species\n1 2 0.5\n2 1 3\n");
  CHECK(sys.K()(0, 1) == 0.5);
  CHECK(sys.K()(1, 0) == 3.0);

  auto parse_message = [](const std::string& s) {
    try {
      parse_network(s);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
      return std::string(e.what());
    }
    FAIL("accepted invalid input");
    return std::string();
  };
  CHECK(parse_message("n 2\n1 2 1\n2 3 1\n").find("line 3") != std::string::npos);
  CHECK(parse_message("n 2\n1 2 1\n2 1 -1\n").find("line 3") != std::string::npos);
  CHECK(parse_message("n 2\n1 2 1\n1 2 1\n2 1 1\n").find("line 3") != std::string::npos);
  CHECK(parse_message("n 3\n1 2 1\n2 1 1\n").find("vertex 3 has no edges") != std::string::npos);
  CHECK(parse_message("1 2 1\n").find("line 1") != std::string::npos);
  parse_message(R"({"n": 2, "edges": [{"tail": 1, "head": 2}]})");
}

TEST_CASE("shortest round-trip formatting") {
  testing::Gen gen(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = gen.log_rate(1e-8, 1e8);
    CHECK(std::stod(format_shortest(v)) == v);
  }
  CHECK(format_shortest(0.1) == "0.1");
  CHECK(format_shortest(2.0) == "2");
}
