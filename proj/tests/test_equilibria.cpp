#include <doctest.h>

#include <Eigen/LU>

#include "hyperchain/equilibria.hpp"
#include "hyperchain/generators.hpp"
#include "support.hpp"

using namespace hyperchain;

namespace {

// The published equilibrium of the five-species example, before normalization.
Vector five_formula(double k3, double k5) {
  Vector z(5);
  z << 1, 1, (k5 - 1) / (k5 - k3), 1, (1 - k3) / (k5 - k3);
  return z / z.sum();
}

}  // namespace

TEST_CASE("five-species example: unique equilibrium") {
  const EquilibriumSet s = positive_equilibria(example_five(0.5, 2.0));
  REQUIRE(s.kind == EquilibriumKind::Unique);
  Vector expect(5);
  expect << 0.25, 0.25, 1.0 / 6, 0.25, 1.0 / 12;
  CHECK((*s.point - expect).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(s.invertible);
  CHECK(s.residual < kResidualTolerance);

  testing::Gen gen(4);
  for (int trial = 0; trial < 50; ++trial) {
    const double k3 = gen.log_rate(), k5 = gen.log_rate();
    const bool positive = (k5 - 1) / (k5 - k3) > 0 && (1 - k3) / (k5 - k3) > 0;
    const EquilibriumSet r = positive_equilibria(example_five(k3, k5));
    if (!positive) {
      CHECK(r.kind == EquilibriumKind::Empty);
      continue;
    }
    REQUIRE(r.kind == EquilibriumKind::Unique);
    CHECK((*r.point - five_formula(k3, k5)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("five-species example: determinant is k3 - k5") {
  for (auto [k3, k5] : {std::pair{0.5, 2.0}, {1.0, 1.0}, {3.0, 0.25}}) {
    CHECK(testing::leibniz_det(example_five(k3, k5).K()) == doctest::Approx(k3 - k5));
  }
}

TEST_CASE("five-species example: continuum when k3 = k5 = 1") {
  const EquilibriumSet s = positive_equilibria(example_five(1.0, 1.0));
  REQUIRE(s.kind == EquilibriumKind::Continuum);
  REQUIRE(s.continuum);
  const ContinuumSet& c = *s.continuum;
  CHECK(c.dimension() == 1);
  CHECK_FALSE(s.invertible);
  REQUIRE(c.interval);
  const Matrix k = example_five(1.0, 1.0).K();
  // Every point of the parametrized segment is (1/4, 1/4, b, 1/4, 1/4 - b).
  for (int i = 0; i <= 10; ++i) {
    const double t = c.interval->first + (c.interval->second - c.interval->first) * i / 10.0;
    Vector param(1);
    param << t;
    const Vector x = c.at(param);
    CHECK(x[0] == doctest::Approx(0.25));
    CHECK(x[1] == doctest::Approx(0.25));
    CHECK(x[3] == doctest::Approx(0.25));
    CHECK(x[2] + x[4] == doctest::Approx(0.25));
    CHECK(x.minCoeff() > -1e-12);
    CHECK(testing::oracle_replicator(k, x).cwiseAbs().maxCoeff() < 1e-12);
  }
  // The closure ends at b = 0 and b = 1/4.
  REQUIRE(c.vertices.size() == 2);
  std::vector<double> ends{c.vertices[0][2], c.vertices[1][2]};
  std::sort(ends.begin(), ends.end());
  CHECK(ends[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ends[1] == doctest::Approx(0.25));
  CHECK(c.depth == doctest::Approx(0.125));
  CHECK(c.base.minCoeff() > 0.0);
}

TEST_CASE("five-species example: empty when k3 = k5 != 1") {
  CHECK(positive_equilibria(example_five(2.0, 2.0)).kind == EquilibriumKind::Empty);
  CHECK(positive_equilibria(example_five(0.5, 0.5)).kind == EquilibriumKind::Empty);
}

TEST_CASE("hypercycles have the barycentre") {
  for (int n = 1; n <= 8; ++n) {
    const EquilibriumSet s = positive_equilibria(HyperchainSystem::uniform(cycle_graph(n)));
    REQUIRE(s.kind == EquilibriumKind::Unique);
    CHECK((*s.point - Vector::Constant(n, 1.0 / n)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("rooted graphs have no positive equilibrium") {
  testing::Gen gen(31);
  int rooted = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Hyperchain h = gen.graph(gen.integer(2, 6), 0.3, 0.05);
    if (!testing::oracle_rooted(h)) continue;
    ++rooted;
    for (int draw = 0; draw < 5; ++draw)
      CHECK(positive_equilibria(HyperchainSystem(h, gen.rates(h))).kind == EquilibriumKind::Empty);
    CHECK_THROWS_AS(construct_existence_rates(h), Error);
  }
  CHECK(rooted > 20);
}

TEST_CASE("existence rates put an equilibrium at the barycentre") {
  const HyperchainSystem six(example_six().graph(), construct_existence_rates(example_six().graph()));
  CHECK(six.K()(0, 1) == 0.5);
  CHECK(six.K()(5, 1) == 0.5);
  CHECK(testing::oracle_replicator(six.K(), Vector::Constant(6, 1.0 / 6)).cwiseAbs().maxCoeff() < 1e-15);

  testing::Gen gen(32);
  int unrooted = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Hyperchain h = gen.graph(gen.integer(1, 7), 0.35, 0.1);
    if (testing::oracle_rooted(h)) continue;
    ++unrooted;
    const Matrix k = construct_existence_rates(h).entries();
    const Vector bary = Vector::Constant(h.size(), 1.0 / h.size());
    CHECK(testing::oracle_replicator(k, bary).cwiseAbs().maxCoeff() < 1e-14);
    // Column sums of K are 1, so K^T 1 = 1.
    CHECK((k.colwise().sum().transpose() - Vector::Ones(h.size())).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(positive_equilibria(k).kind != EquilibriumKind::Empty);
  }
  CHECK(unrooted > 50);
}

TEST_CASE("uniqueness rates") {
  const Hyperchain g5 = example_five(0.5, 2.0).graph();
  const Hyperchain h1 = testing::from_pairs(5, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 1}});
  const LinearSubgraph d1 = make_linear_subgraph({1, 2, 3, 4, 0});
  const Matrix k = construct_uniqueness_rates(g5, 1e-3, d1).entries();
  CHECK(h1.adjacency().cwiseProduct(k) == h1.adjacency());
  CHECK(testing::leibniz_det(k) == doctest::Approx(1.0).epsilon(1e-2));
  const EquilibriumSet s = positive_equilibria(k);
  REQUIRE(s.kind == EquilibriumKind::Unique);
  CHECK((*s.point - Vector::Constant(5, 0.2)).cwiseAbs().maxCoeff() < 1e-2);
  CHECK(testing::oracle_replicator(k, *s.point).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(construct_uniqueness_rates(testing::chain(3)), Error);
  const LinearSubgraph bad = make_linear_subgraph({2, 0, 1});
  try {
    construct_uniqueness_rates(cycle_graph(3), 1e-3, bad);
    FAIL("accepted a non-subgraph");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotASubgraph);
  }

  testing::Gen gen(33);
  for (int trial = 0; trial < 200; ++trial) {
    const Hyperchain h = gen.graph(gen.integer(1, 6), 0.4, 0.1);
    const bool has = !testing::oracle_linear_subgraphs(h).empty();
    if (!has) {
      CHECK_THROWS_AS(construct_uniqueness_rates(h), Error);
      continue;
    }
    const Matrix kk = construct_uniqueness_rates(h).entries();
    const EquilibriumSet r = positive_equilibria(kk);
    REQUIRE(r.kind == EquilibriumKind::Unique);
    CHECK(testing::oracle_replicator(kk, *r.point).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("trichotomy against an independent LU solve") {
  testing::Gen gen(34);
  int counts[3] = {0, 0, 0};
  for (int trial = 0; trial < 400; ++trial) {
    const Hyperchain h = gen.graph(gen.integer(1, 6), 0.35, 0.1);
    Matrix k = gen.rates(h).entries();
    if (gen.coin(0.3)) k = k.unaryExpr([&](double v) { return v == 0.0 ? 0.0 : double(gen.integer(1, 3)); });
    const EquilibriumSet s = positive_equilibria(k);
    ++counts[static_cast<int>(s.kind)];
    const Eigen::FullPivLU<Matrix> lu(k.transpose());
    if (lu.isInvertible()) {
      const Vector z = lu.solve(Vector::Ones(h.size()));
      const bool positive = z.minCoeff() > 1e-9 * z.cwiseAbs().maxCoeff();
      CHECK(s.kind == (positive ? EquilibriumKind::Unique : EquilibriumKind::Empty));
      if (positive) CHECK((*s.point - z / z.sum()).cwiseAbs().maxCoeff() < 1e-9);
    } else {
      CHECK(s.kind != EquilibriumKind::Unique);
    }
    if (s.kind == EquilibriumKind::Unique) {
      CHECK(s.point->minCoeff() > 0.0);
      CHECK(s.point->sum() == doctest::Approx(1.0));
      CHECK(testing::oracle_replicator(k, *s.point).cwiseAbs().maxCoeff() < 1e-9);
      CHECK(!testing::oracle_linear_subgraphs(h).empty());
    }
    if (s.kind == EquilibriumKind::Continuum) {
      CHECK(s.continuum->base.minCoeff() > 0.0);
      CHECK(testing::oracle_replicator(k, s.continuum->base).cwiseAbs().maxCoeff() < 1e-9);
      for (int c = 0; c < s.continuum->dimension(); ++c)
        CHECK(std::abs(s.continuum->basis.col(c).sum()) < 1e-12);
    }
    if (testing::oracle_rooted(h)) CHECK(s.kind == EquilibriumKind::Empty);
  }
  CHECK(counts[0] > 0);
  CHECK(counts[1] > 0);
}

TEST_CASE("same-parity graphs never produce a continuum") {
  testing::Gen gen(35);
  int exercised = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Hyperchain h = gen.graph(gen.integer(2, 6), 0.4, 0.1);
    const auto perms = testing::oracle_linear_subgraphs(h);
    if (perms.empty()) continue;
    const int first = testing::even_cycle_count(perms[0]) % 2;
    bool same = true;
    for (const auto& p : perms) same = same && testing::even_cycle_count(p) % 2 == first;
    if (!same) continue;
    ++exercised;
    for (int draw = 0; draw < 6; ++draw) {
      Matrix k = draw == 0 ? testing::adjacency_of(h) : gen.rates(h).entries();
      if (draw == 1) k = k.unaryExpr([&](double v) { return v == 0.0 ? 0.0 : double(gen.integer(1, 3)); });
      CHECK(positive_equilibria(k).kind != EquilibriumKind::Continuum);
    }
  }
  CHECK(exercised > 30);
}

TEST_CASE("boundary equilibria of the 3-hypercycle are the vertices") {
  const auto beqs = boundary_equilibria(HyperchainSystem::uniform(cycle_graph(3)));
  REQUIRE(beqs.size() == 3);
  CHECK(beqs[0].face == std::vector<int>{0, 1});
  CHECK(beqs[1].face == std::vector<int>{0, 2});
  CHECK(beqs[2].face == std::vector<int>{1, 2});
  CHECK(beqs[0].point == Vector::Unit(3, 2));
  CHECK(beqs[1].point == Vector::Unit(3, 1));
  CHECK(beqs[2].point == Vector::Unit(3, 0));
  for (const auto& b : beqs)
    CHECK(testing::oracle_replicator(cycle_graph(3).adjacency(), b.point).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("five-species example has no equilibrium on the face x3 = 0") {
  for (const auto& b : boundary_equilibria(example_five(0.5, 2.0)))
    CHECK(b.face != std::vector<int>{2});
}

TEST_CASE("boundary equilibria embed into equilibria of the full system") {
  testing::Gen gen(36);
  for (int trial = 0; trial < 100; ++trial) {
    const HyperchainSystem sys = gen.system(gen.graph(gen.integer(2, 5), 0.4, 0.1));
    const Matrix k = sys.K();
    for (const BoundaryEquilibrium& b : boundary_equilibria(sys)) {
      CHECK(b.face.size() + b.support.size() == static_cast<std::size_t>(sys.size()));
      for (int i : b.face) CHECK(b.point[i] == 0.0);
      for (int i : b.support) CHECK(b.point[i] > 0.0);
      CHECK(b.point.sum() == doctest::Approx(1.0));
      CHECK(testing::oracle_replicator(k, b.point).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("boundary enumeration bound") {
  CHECK_THROWS_AS(boundary_equilibria(HyperchainSystem::uniform(cycle_graph(kBoundaryEnumerationBound + 1))),
                  Error);
}
