#pragma once

// Instance generators: hypercycles, Hamiltonian graphs with chords, random
// hyperchains, and the two worked examples with their published rate labels.

#include "hyperchain/graph.hpp"
#include "hyperchain/random.hpp"

namespace hyperchain {

/// X_1 --> X_2 --> ... --> X_n --> X_1 (a self-loop when n == 1).
Hyperchain cycle_graph(int n);

/// The n-cycle plus `chords` distinct non-cycle edges, chosen uniformly.
/// Self-loops count as chords when `allow_self_loops` is set.
Hyperchain hamiltonian_plus_chords(int n, int chords, Rng& rng, bool allow_self_loops = false);

/// Each ordered pair (i, j), i != j, is an edge with probability p; each
/// self-loop with probability `loop_p`. Vertices left isolated receive one
/// random edge.
Hyperchain random_hyperchain(int n, double p, Rng& rng, double loop_p = 0.0);

/// Same graph with its vertices relabelled by a uniform random permutation.
Hyperchain shuffle_labels(const Hyperchain& h, Rng& rng);

/// Log-uniform rates on the edges of h.
RateMatrix random_rates(const Hyperchain& h, Rng& rng, double lo = 0.1, double hi = 10.0);
HyperchainSystem random_system(const Hyperchain& h, Rng& rng, double lo = 0.1, double hi = 10.0);

/// Five species: 3->1, 1->2, 2->3, 3->4 (rate k3), 4->5, 5->4 (rate k5), 5->1;
/// the unlabeled edges have rate 1.
HyperchainSystem example_five(double k3, double k5);

/// Six species, strongly connected and not Hamiltonian:
/// 1->2:1, 2->1:2, 2->3:3, 3->4:1, 4->3:1, 4->5:3, 5->6:2, 6->5:1, 6->2:3, 5->1:1.
HyperchainSystem example_six();

}  // namespace hyperchain
