#include <doctest.h>

#include <cmath>

#include "hyperchain/equilibria.hpp"
#include "hyperchain/generators.hpp"
#include "hyperchain/graph_analysis.hpp"
#include "hyperchain/permanence.hpp"
#include "support.hpp"

using namespace hyperchain;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Independent check of K0^T z = c 1 and z^T K0^T z = c.
double identity_residual(const Matrix& k0, const Vector& z, double c) {
  const Vector lhs = k0.transpose() * z;
  return std::max((lhs - Vector::Constant(z.size(), c)).cwiseAbs().maxCoeff(), std::abs(z.dot(lhs) - c));
}

}  // namespace

TEST_CASE("theorem short-circuits") {
  const PermanenceVerdict chain = numeric_permanence_test(HyperchainSystem::uniform(testing::chain(3)));
  CHECK(chain.outcome == PermanenceOutcome::NotPermanent);
  CHECK(chain.witness == "not strongly connected");
  CHECK(chain.trial_results.empty());

  const PermanenceVerdict empty = numeric_permanence_test(example_five(2.0, 2.0));
  CHECK(empty.outcome == PermanenceOutcome::NotPermanent);
  CHECK(empty.witness == "no positive equilibrium");
  REQUIRE(empty.equilibria);
  CHECK(empty.equilibria->kind == EquilibriumKind::Empty);
}

TEST_CASE("hypercycles test permanent") {
  for (int n : {2, 3, 5}) {
    const PermanenceVerdict v = numeric_permanence_test(HyperchainSystem::uniform(cycle_graph(n)));
    CHECK_MESSAGE(v.outcome == PermanenceOutcome::LikelyPermanent, "n = " << n);
    CHECK(v.trials == static_cast<int>(v.trial_results.size()));
    CHECK(v.delta_estimate > 0.0);
    for (const PermanenceTrial& t : v.trial_results) CHECK(t.follow_up == FollowUp::Settled);
  }
}

TEST_CASE("the six-species example tests permanent without a Hamiltonian cycle") {
  const HyperchainSystem six = example_six();
  CHECK(find_hamiltonian_cycle(six.graph()).status == SearchStatus::Absent);
  const PermanenceVerdict v = numeric_permanence_test(six);
  CHECK(v.outcome == PermanenceOutcome::LikelyPermanent);
  CHECK(v.floor_estimate > 0.0);
}

TEST_CASE("battery layout") {
  PermanenceOptions opts;
  const auto a = permanence_battery(HyperchainSystem::uniform(cycle_graph(4)), opts);
  const auto b = permanence_battery(HyperchainSystem::uniform(cycle_graph(4)), opts);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].label == b[i].label);
    CHECK(a[i].x0 == b[i].x0);
    CHECK(a[i].x0.sum() == doctest::Approx(1.0));
    CHECK(a[i].x0.minCoeff() > 0.0);
  }
  // n = 4: 4 vertices + 6 edges + 4 triangles, then the random mixtures.
  int faces = 0, random = 0;
  for (const auto& t : a) {
    faces += t.label.rfind("face", 0) == 0;
    random += t.label.rfind("random#", 0) == 0;
  }
  CHECK(faces == 14);
  CHECK(random == opts.random_starts);

  opts.seed = 99;
  const auto c = permanence_battery(HyperchainSystem::uniform(cycle_graph(4)), opts);
  CHECK(c.back().x0 != a.back().x0);
}

TEST_CASE("verdicts are reproducible") {
  PermanenceOptions opts;
  opts.t_end = 100.0;
  const HyperchainSystem sys = HyperchainSystem::uniform(cycle_graph(3));
  CHECK(to_json(numeric_permanence_test(sys, opts)).dump() == to_json(numeric_permanence_test(sys, opts)).dump());
}

TEST_CASE("Hamiltonian certificate rates") {
  CHECK(hamiltonian_permanence_rates(cycle_graph(5)).entries() == cycle_graph(5).adjacency());
  const Hyperchain chord = testing::from_pairs(4, {{1, 2}, {2, 3}, {3, 4}, {4, 1}, {1, 3}});
  const Matrix k = hamiltonian_permanence_rates(chord).entries();
  CHECK(k(0, 2) == 1.0 / 16);
  CHECK(k(0, 1) == 1.0);
  CHECK(k(3, 0) == 1.0);
  try {
    hamiltonian_permanence_rates(example_six().graph());
    FAIL("accepted a non-Hamiltonian graph");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotHamiltonian);
  }

  testing::Gen gen(61);
  for (int trial = 0; trial < 8; ++trial) {
    const Hyperchain h = gen.hamiltonian(gen.integer(2, 5), 0.3);
    const HyperchainSystem sys(h, hamiltonian_permanence_rates(h));
    const int chords = static_cast<int>(h.edge_count()) - h.size();
    const double small = 1.0 / (4.0 * h.size());
    CHECK(((sys.K().array() == small).count()) == chords);
    CHECK(numeric_permanence_test(sys).outcome == PermanenceOutcome::LikelyPermanent);
  }
}

TEST_CASE("nonpermanence construction") {
  const Hyperchain h3 = testing::from_pairs(3, {{1, 2}, {2, 3}, {3, 1}, {1, 3}});
  const NonpermanenceConstruction c = nonpermanence_rates(h3);
  CHECK(c.cover.successor == std::vector<int>{1, 2, 0});
  CHECK(c.special.tail == 0);
  CHECK(c.special.head == 2);
  CHECK(c.c == 1);
  CHECK(c.z == vec({1, -1, 1}));
  CHECK(c.identity_residual <= 1e-10);
  CHECK(identity_residual(c.limit_rates.entries(), c.z, 1.0) <= 1e-12);
  CHECK(c.rates.entries()(0, 2) == 2.0);

  const Hyperchain h4 = testing::from_pairs(4, {{1, 2}, {2, 3}, {3, 4}, {4, 1}, {2, 4}});
  const NonpermanenceConstruction d = nonpermanence_rates(h4);
  Vector expect = 0.5 * Vector::Ones(4);
  expect[d.c] = -0.5;
  CHECK(d.z == expect);
  CHECK((d.z.array() < 0).count() == 1);
  CHECK(identity_residual(d.limit_rates.entries(), d.z, 0.5) <= 1e-12);

  try {
    nonpermanence_rates(cycle_graph(4));
    FAIL("accepted a cycle graph");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Inapplicable);
  }
  CHECK_THROWS_AS(nonpermanence_rates(testing::chain(3)), Error);

  // Random applicable graphs: the identities hold and K_eps keeps the support.
  testing::Gen gen(62);
  int built = 0;
  for (int trial = 0; trial < 200 && built < 40; ++trial) {
    const Hyperchain h = gen.hamiltonian(gen.integer(3, 6), 0.3);
    if (is_cycle_graph(h)) continue;
    const NonpermanenceConstruction e = nonpermanence_rates(h, 1e-3);
    ++built;
    const int n = h.size();
    CHECK(identity_residual(e.limit_rates.entries(), e.z, 1.0 / (n - 2)) <= 1e-10);
    CHECK(e.z.minCoeff() < 0.0);
    CHECK(e.z.sum() == doctest::Approx(1.0));
    CHECK(((e.rates.entries().array() > 0) == (h.adjacency().array() > 0)).all());
    CHECK(positive_equilibria(e.limit_rates.entries()).kind == EquilibriumKind::Empty);
  }
  CHECK(built == 40);
}

TEST_CASE("nonpermanence systems test not permanent") {
  PermanenceOptions opts;
  opts.numeric_only = true;
  for (const Hyperchain& h : {testing::from_pairs(3, {{1, 2}, {2, 3}, {3, 1}, {1, 3}}),
                              testing::from_pairs(4, {{1, 2}, {2, 3}, {3, 4}, {4, 1}, {2, 4}})}) {
    const HyperchainSystem sys(h, nonpermanence_rates(h).rates);
    const PermanenceVerdict v = numeric_permanence_test(sys, opts);
    CHECK(v.outcome == PermanenceOutcome::NotPermanent);
    CHECK(v.witness == "trajectory");
    REQUIRE(v.witness_trial);
    const PermanenceTrial& w = v.trial_results[*v.witness_trial];
    CHECK(w.late_min < opts.fail_bound);
    CHECK(w.trend < 0.0);
    CHECK(w.follow_up == FollowUp::Decaying);
  }
}

TEST_CASE("psi average") {
  const HyperchainSystem c3 = HyperchainSystem::uniform(cycle_graph(3));
  CHECK(std::abs(psi_average(c3, Vector::Constant(3, 1.0 / 3), 50.0)) <= 1e-10);
  CHECK(psi_average(c3, vec({0.5, 0.5, 0.0}), 100.0) > 0.0);

  const HyperchainSystem five = example_five(0.5, 2.0);
  CHECK(std::abs(psi_average(five, *positive_equilibria(five).point, 50.0)) <= 1e-10);

  // Oracle for a short horizon: trapezoid rule over a fine RK4 path.
  const Vector x0 = vec({0.2, 0.3, 0.5});
  const int steps = 20000;
  const double t_end = 2.0;
  const auto path = testing::rk4_path([&](const Vector& x) { return testing::oracle_replicator(c3.K(), x); }, x0,
                                      t_end, steps);
  const auto psi = [&](const Vector& x) {
    const Vector f = c3.K().transpose() * x;
    return (f.array() - x.dot(f)).sum();
  };
  double integral = 0.0;
  for (int i = 0; i < steps; ++i) integral += 0.5 * (psi(path[i]) + psi(path[i + 1])) * (t_end / steps);
  CHECK(psi_average(c3, x0, t_end) == doctest::Approx(integral / t_end).epsilon(1e-6));

  // The constructed counterexample has a boundary start with non-positive average.
  const Hyperchain h3 = testing::from_pairs(3, {{1, 2}, {2, 3}, {3, 1}, {1, 3}});
  const HyperchainSystem bad(h3, nonpermanence_rates(h3).rates);
  double lowest = std::numeric_limits<double>::infinity();
  for (const PermanenceTrial& t : permanence_battery(bad, PermanenceOptions{})) {
    Vector b = t.x0;
    for (int i = 0; i < b.size(); ++i)
      if (b[i] < 0.01) b[i] = 0.0;
    b /= b.sum();
    lowest = std::min(lowest, psi_average(bad, b, 100.0));
  }
  CHECK(lowest <= 0.0);
}

TEST_CASE("short-circuits never contradict the numerics") {
  testing::Gen gen(63);
  PermanenceOptions numeric;
  numeric.numeric_only = true;
  numeric.t_end = 200.0;
  numeric.random_starts = 6;
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 20; ++trial) {
    const Hyperchain h = gen.graph(gen.integer(2, 4), 0.45, 0.1);
    const HyperchainSystem sys = gen.system(h);
    const PermanenceVerdict quick = numeric_permanence_test(sys);
    if (quick.outcome != PermanenceOutcome::NotPermanent || quick.witness == "trajectory") continue;
    // Keep the sample balanced between the two witnesses.
    if (quick.witness == "not strongly connected" && checked % 2 == 1) continue;
    ++checked;
    const PermanenceVerdict full = numeric_permanence_test(sys, numeric);
    CHECK_MESSAGE(full.outcome != PermanenceOutcome::LikelyPermanent, "trial " << trial);
    // Algebraic decay can keep the minimum above delta over a finite horizon,
    // but then the trial does not settle under horizon extension.
    bool evidence = false;
    for (const PermanenceTrial& t : full.trial_results)
      evidence = evidence || t.overall_min_log < std::log(numeric.delta) || t.follow_up != FollowUp::Settled;
    CHECK(evidence);
  }
  CHECK(checked == 20);
}
