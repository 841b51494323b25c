#include "hyperchain/permanence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hyperchain/network_io.hpp"
#include "hyperchain/parallel.hpp"
#include "hyperchain/random.hpp"

namespace hyperchain {

namespace {

std::string face_label(std::string_view kind, const std::vector<int>& vs) {
  std::string s(kind);
  s += '{';
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(vs[i] + 1);
  }
  return s + '}';
}

void subsets_of_size(int n, int size, std::vector<std::vector<int>>& out) {
  std::vector<int> idx(size);
  for (int i = 0; i < size; ++i) idx[i] = i;
  while (true) {
    out.push_back(idx);
    int i = size - 1;
    while (i >= 0 && idx[i] == n - size + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
}

Vector dirichlet(Rng& rng, int m) {
  Vector w(m);
  for (int i = 0; i < m; ++i) w[i] = -std::log(1.0 - uniform01(rng));
  return w / w.sum();
}

PermanenceTrial make_trial(std::string label, Vector x0) {
  PermanenceTrial t;
  t.label = std::move(label);
  t.x0 = std::move(x0);
  return t;
}

bool already_listed(const std::vector<PermanenceTrial>& trials, const Vector& x) {
  return std::any_of(trials.begin(), trials.end(), [&](const PermanenceTrial& t) {
    return (t.x0 - x).cwiseAbs().maxCoeff() < 1e-12;
  });
}

// Follows ln min_i x_i along the orbit and summarizes the late window.
struct WindowTracker {
  double window_start, mid, t_end;
  double late_min = std::numeric_limits<double>::infinity();
  double overall_min = std::numeric_limits<double>::infinity();
  double first_half = 0.0, second_half = 0.0;
  double prev_t = 0.0, prev_m = 0.0;
  bool has_prev = false;

  void add_segment(double t0, double m0, double t1, double m1, double lo, double hi, double& acc) {
    const double a = std::max(t0, lo), b = std::min(t1, hi);
    if (b <= a) return;
    auto at = [&](double t) { return m0 + (m1 - m0) * (t - t0) / (t1 - t0); };
    acc += 0.5 * (at(a) + at(b)) * (b - a);
  }

  void observe(double t, const Vector& y) {
    const double m = y.minCoeff();
    overall_min = std::min(overall_min, m);
    if (t >= window_start) late_min = std::min(late_min, m);
    if (has_prev && t > prev_t) {
      add_segment(prev_t, prev_m, t, m, window_start, mid, first_half);
      add_segment(prev_t, prev_m, t, m, mid, t_end, second_half);
    }
    prev_t = t;
    prev_m = m;
    has_prev = true;
  }
};

void run_trial(const HyperchainSystem& sys, const PermanenceOptions& opts, PermanenceTrial& trial) {
  const double t_end = opts.t_end;
  const double window_start = (1.0 - opts.window_fraction) * t_end;
  WindowTracker tracker{window_start, 0.5 * (window_start + t_end), t_end};

  IntegrationOptions io;
  io.rtol = opts.rtol;
  io.atol = opts.atol;
  io.detect_convergence = false;
  io.store_states = false;
  io.observer = [&](double t, const Vector&, const Vector& y) { tracker.observe(t, y); };
  const Trajectory traj = integrate(sys, Mode::Relative, trial.x0, t_end, io);
  trial.termination = traj.termination;
  trial.final_state = traj.final_state;
  trial.overall_min_log = tracker.overall_min;
  if (traj.termination != Termination::Completed || !std::isfinite(tracker.late_min)) {
    trial.late_min_log = std::numeric_limits<double>::quiet_NaN();
    trial.late_min = std::numeric_limits<double>::quiet_NaN();
    trial.trend = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  const double half = 0.5 * (t_end - window_start);
  trial.late_min_log = tracker.late_min;
  trial.late_min = std::exp(tracker.late_min);
  trial.trend = half > 0.0 ? (tracker.second_half - tracker.first_half) / (half * half) : 0.0;
}

// Continues a trial over segments [T, 2T], [2T, 4T], ... and compares
// successive segment minima m_k of ln min_i x_i. Settled: |m_k - m_{k-1}| <= tol,
// or two successive rises by more than tol. Decaying: two successive
// drops each at least 1.5 times the one before, ending below the fail bound.
// An orbit tending to the boundary at a steady exponential rate loses twice
// as much per doubled segment (more along a heteroclinic cycle), while one
// relaxing onto an interior attractor ends with shrinking drops; a single
// large drop is common when an orbit leaves a saddle region.
void follow_up(const HyperchainSystem& sys, const PermanenceOptions& opts, PermanenceTrial& trial) {
  trial.floor_log = trial.late_min_log;
  trial.follow_up_horizon = opts.t_end;
  if (trial.final_state.size() == 0 || trial.final_state.minCoeff() <= 0.0) {
    trial.follow_up = FollowUp::Decaying;  // a coordinate underflowed to zero
    return;
  }
  IntegrationOptions io;
  io.rtol = opts.rtol;
  io.atol = opts.atol;
  io.detect_convergence = false;
  io.store_states = false;
  double seg_min = 0.0;
  io.observer = [&](double, const Vector&, const Vector& y) { seg_min = std::min(seg_min, y.minCoeff()); };

  const double fail_log = std::log(opts.fail_bound);
  Vector x = trial.final_state;
  double prev = trial.late_min_log;
  double prev_drop = std::numeric_limits<double>::quiet_NaN();
  int growing_drops = 0;
  int rising = 0;
  double t = opts.t_end;
  trial.follow_up = FollowUp::Unresolved;
  while (t < opts.extension_factor * opts.t_end) {
    seg_min = std::numeric_limits<double>::infinity();
    const Trajectory traj = integrate(sys, Mode::Relative, x, t, io);
    t *= 2.0;
    trial.follow_up_horizon = t;
    if (traj.termination != Termination::Completed) return;
    trial.floor_log = seg_min;
    const double drop = prev - seg_min;
    rising = drop < -opts.settle_tolerance ? rising + 1 : 0;
    if (std::abs(drop) <= opts.settle_tolerance || rising >= 2) {
      trial.follow_up = FollowUp::Settled;
      return;
    }
    growing_drops = drop > 0.0 && prev_drop > 0.0 && drop >= 1.5 * prev_drop ? growing_drops + 1 : 0;
    if (growing_drops >= 2 && seg_min < fail_log) {
      trial.follow_up = FollowUp::Decaying;
      return;
    }
    prev_drop = drop;
    prev = seg_min;
    x = traj.final_state;
    if (x.minCoeff() <= 0.0) {
      trial.follow_up = FollowUp::Decaying;
      return;
    }
  }
}

}  // namespace

std::vector<PermanenceTrial> permanence_battery(const HyperchainSystem& sys,
                                                const PermanenceOptions& opts) {
  const int n = sys.size();
  std::vector<PermanenceTrial> trials;
  if (n == 1) {
    trials.push_back(make_trial("interior", Vector::Ones(1)));
    return trials;
  }
  const double off = opts.boundary_offset;
  if (!(off > 0.0) || off * n >= 1.0)
    throw Error(ErrorCode::InvalidArgument, "boundary offset must be in (0, 1/n)");

  auto near_face = [&](const std::vector<int>& support, const Vector& on_face) {
    Vector x = Vector::Constant(n, off);
    const double mass = 1.0 - off * (n - static_cast<int>(support.size()));
    for (std::size_t i = 0; i < support.size(); ++i) x[support[i]] = mass * on_face[static_cast<Eigen::Index>(i)];
    return x;
  };

  for (int size = 1; size < n; ++size) {
    const bool small = size - 1 <= opts.max_face_dimension;
    const bool large = n - size <= opts.max_face_codimension;
    if (!small && !large) continue;
    std::vector<std::vector<int>> supports;
    subsets_of_size(n, size, supports);
    for (const auto& s : supports) {
      const Vector x = near_face(s, Vector::Constant(size, 1.0 / size));
      if (!already_listed(trials, x)) trials.push_back(make_trial(face_label("face", s), x));
    }
  }

  if (n <= kBoundaryEnumerationBound) {
    for (const BoundaryEquilibrium& beq : boundary_equilibria(sys)) {
      if (beq.support.size() == 1) continue;  // identical to the vertex face start
      Vector local(beq.support.size());
      for (std::size_t i = 0; i < beq.support.size(); ++i) local[static_cast<Eigen::Index>(i)] = beq.point[beq.support[i]];
      const Vector x = near_face(beq.support, local);
      if (!already_listed(trials, x)) trials.push_back(make_trial(face_label("boundary-eq", beq.support), x));
    }
  }

  Rng rng(derive_seed(opts.seed, 0x7065726dULL));
  for (int r = 0; r < opts.random_starts; ++r) {
    std::vector<int> support;
    while (support.empty() || static_cast<int>(support.size()) == n) {
      support.clear();
      for (int i = 0; i < n; ++i)
        if (bernoulli(rng, 0.5)) support.push_back(i);
    }
    const Vector on_face = dirichlet(rng, static_cast<int>(support.size()));
    Vector p = Vector::Zero(n);
    for (std::size_t i = 0; i < support.size(); ++i) p[support[i]] = on_face[static_cast<Eigen::Index>(i)];
    const double lambda = log_uniform(rng, off, std::min(0.5, 100.0 * off));
    const Vector x = (1.0 - lambda) * p + lambda * dirichlet(rng, n);
    trials.push_back(make_trial("random#" + std::to_string(r + 1), x / x.sum()));
  }
  return trials;
}

PermanenceVerdict numeric_permanence_test(const HyperchainSystem& sys, const PermanenceOptions& opts) {
  PermanenceVerdict v;
  v.parameters = opts;
  v.delta_estimate = std::numeric_limits<double>::quiet_NaN();
  if (!(opts.t_end > 0.0) || !(opts.window_fraction > 0.0 && opts.window_fraction <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "t_end must be positive and window fraction in (0, 1]");

  if (!opts.numeric_only) {
    if (!is_strongly_connected(sys.graph())) {
      v.outcome = PermanenceOutcome::NotPermanent;
      v.witness = "not strongly connected";
      return v;
    }
    v.equilibria = positive_equilibria(sys);
    if (v.equilibria->kind == EquilibriumKind::Empty) {
      v.outcome = PermanenceOutcome::NotPermanent;
      v.witness = "no positive equilibrium";
      return v;
    }
  }

  v.trial_results = permanence_battery(sys, opts);
  v.trials = static_cast<int>(v.trial_results.size());
  parallel_for(v.trial_results.size(), opts.threads,
               [&](std::size_t i) { run_trial(sys, opts, v.trial_results[i]); });

  // Every trial is continued until its running minimum stops moving; a late
  // window above delta alone does not rule out slow (algebraic) decay.
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < v.trial_results.size(); ++i) {
    const PermanenceTrial& t = v.trial_results[i];
    if (std::isnan(t.late_min)) continue;
    pending.push_back(i);
    if (t.late_min < opts.delta) v.extended = true;
  }
  // The lowest trial first: when it confirms decay the others are not needed.
  std::stable_sort(pending.begin(), pending.end(), [&](std::size_t a, std::size_t b) {
    return v.trial_results[a].late_min < v.trial_results[b].late_min;
  });
  if (!pending.empty()) {
    PermanenceTrial& lowest = v.trial_results[pending.front()];
    follow_up(sys, opts, lowest);
    const bool witness = lowest.follow_up == FollowUp::Decaying && lowest.late_min < opts.fail_bound &&
                         lowest.trend < 0.0;
    if (!witness) {
      parallel_for(pending.size() - 1, opts.threads,
                   [&](std::size_t k) { follow_up(sys, opts, v.trial_results[pending[k + 1]]); });
    }
  }

  bool all_good = true;
  double delta = std::numeric_limits<double>::infinity();
  double floor = std::numeric_limits<double>::infinity();
  for (int i = 0; i < v.trials; ++i) {
    const PermanenceTrial& t = v.trial_results[i];
    if (std::isnan(t.late_min)) {
      all_good = false;
      continue;
    }
    delta = std::min(delta, t.late_min);
    if (t.follow_up == FollowUp::NotRun) {
      floor = std::min(floor, t.late_min);
      continue;
    }
    floor = std::min(floor, std::exp(t.floor_log));
    if (t.follow_up != FollowUp::Settled) all_good = false;
    // A trajectory witness must sit below the fail bound with a falling trend
    // and keep falling over the extension.
    if (!v.witness_trial && t.follow_up == FollowUp::Decaying && t.late_min < opts.fail_bound && t.trend < 0.0)
      v.witness_trial = i;
  }
  v.delta_estimate = std::isfinite(delta) ? delta : std::numeric_limits<double>::quiet_NaN();
  v.floor_estimate = std::isfinite(floor) ? floor : std::numeric_limits<double>::quiet_NaN();
  if (v.witness_trial) {
    v.outcome = PermanenceOutcome::NotPermanent;
    v.witness = "trajectory";
  } else if (all_good) {
    v.outcome = PermanenceOutcome::LikelyPermanent;
  } else {
    v.outcome = PermanenceOutcome::Inconclusive;
  }
  return v;
}

RateMatrix hamiltonian_permanence_rates(const Hyperchain& h) {
  const HamiltonianSearch search = find_hamiltonian_cycle(h);
  if (search.status != SearchStatus::Found)
    throw Error(ErrorCode::NotHamiltonian, search.status == SearchStatus::Absent
                                               ? "graph has no Hamiltonian cycle"
                                               : "Hamiltonian search exhausted its budget");
  const int n = h.size();
  Matrix k = h.adjacency() / (4.0 * n);
  for (std::size_t i = 0; i < search.cycle.size(); ++i)
    k(search.cycle[i], search.cycle[(i + 1) % search.cycle.size()]) = 1.0;
  return RateMatrix(std::move(k));
}

std::optional<LinearSubgraph> smallest_spanning_linear_subgraph(const Hyperchain& h) {
  const int n = h.size();
  std::vector<int> successor(n, -1);
  std::vector<bool> used(n, false);

  // Can vertices from..n-1 still be matched into the unused heads?
  auto completable = [&](int from) {
    std::vector<int> free_heads;
    std::vector<int> head_index(n, -1);
    for (int w = 0; w < n; ++w)
      if (!used[w]) {
        head_index[w] = static_cast<int>(free_heads.size());
        free_heads.push_back(w);
      }
    std::vector<std::vector<int>> adj(n - from);
    for (int v = from; v < n; ++v)
      for (int w : h.out_neighbors(v))
        if (head_index[w] >= 0) adj[v - from].push_back(head_index[w]);
    const auto match = maximum_bipartite_matching(n - from, static_cast<int>(free_heads.size()), adj);
    return std::find(match.begin(), match.end(), -1) == match.end();
  };

  if (!completable(0)) return std::nullopt;
  for (int v = 0; v < n; ++v) {
    for (int w : h.out_neighbors(v)) {
      if (used[w]) continue;
      used[w] = true;
      if (completable(v + 1)) {
        successor[v] = w;
        break;
      }
      used[w] = false;
    }
  }
  return make_linear_subgraph(std::move(successor));
}

NonpermanenceConstruction nonpermanence_rates(const Hyperchain& h, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (!is_strongly_connected(h))
    throw Error(ErrorCode::Inapplicable, "graph is not strongly connected");
  if (is_cycle_graph(h)) throw Error(ErrorCode::Inapplicable, "graph is a single cycle");
  std::optional<LinearSubgraph> cover = smallest_spanning_linear_subgraph(h);
  if (!cover) throw Error(ErrorCode::Inapplicable, "graph has no spanning linear subgraph");

  const int n = h.size();
  std::optional<Edge> special;
  for (const Edge& e : h.edges()) {
    if (cover->successor[e.tail] != e.head) {
      special = e;
      break;
    }
  }
  // Strongly connected and not a cycle graph, so some edge lies outside the cover.
  if (!special) throw Error(ErrorCode::Inapplicable, "every edge lies on the spanning linear subgraph");
  int c = -1;
  for (int v = 0; v < n; ++v)
    if (cover->successor[v] == special->head) c = v;

  Matrix k0 = Matrix::Zero(n, n);
  for (const Edge& e : cover->edges()) k0(e.tail, e.head) = 1.0;
  k0(special->tail, special->head) = 2.0;
  Matrix keps = h.adjacency() * epsilon;
  for (const Edge& e : cover->edges()) keps(e.tail, e.head) = 1.0;
  keps(special->tail, special->head) = 2.0;

  Vector w = Vector::Ones(n);
  w[c] = -1.0;
  NonpermanenceConstruction out{RateMatrix(std::move(keps)), RateMatrix(k0), *cover, *special, c, w};
  if (n > 2) {
    out.z = w / static_cast<double>(n - 2);
    const Vector lhs = k0.transpose() * out.z;
    const double quad = out.z.dot(lhs);
    out.identity_residual = std::max((lhs - Vector::Constant(n, 1.0 / (n - 2))).cwiseAbs().maxCoeff(),
                                     std::abs(quad - 1.0 / (n - 2)));
  } else {
    out.normalized = false;
    out.identity_residual = (k0.transpose() * w - Vector::Ones(n)).cwiseAbs().maxCoeff();
  }
  if (out.identity_residual > 1e-10 || !(out.z[c] < 0.0))
    throw Error(ErrorCode::NotAnEquilibrium, "constructed witness failed its identity check");
  return out;
}

double psi_average(const HyperchainSystem& sys, const Vector& x0, double t_end,
                   const IntegrationOptions& opts) {
  const int n = sys.size();
  if (x0.size() != n) throw Error(ErrorCode::DimensionMismatch, "initial state has the wrong dimension");
  if (std::abs(x0.sum() - 1.0) > 1e-9 || x0.minCoeff() < 0.0)
    throw Error(ErrorCode::InvalidArgument, "psi_average needs a point on the simplex");
  if (t_end <= 0.0) return 0.0;

  std::vector<bool> frozen(n);
  Vector state(n + 1);
  for (int i = 0; i < n; ++i) {
    frozen[i] = x0[i] == 0.0;
    state[i] = frozen[i] ? 0.0 : std::log(x0[i]);
  }
  state[n] = 0.0;
  const Matrix kt = sys.K().transpose();
  Vector x(n), f(n);
  // Log coordinates on the support; the last component accumulates Psi.
  RhsFunction rhs = [&](double, const Vector& s, Vector& ds) {
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      if (!frozen[i]) m = std::max(m, s[i]);
    for (int i = 0; i < n; ++i) x[i] = frozen[i] ? 0.0 : std::exp(s[i] - m);
    x /= x.sum();
    f.noalias() = kt * x;
    const double rho = x.dot(f);
    double psi = 0.0;
    for (int i = 0; i < n; ++i) {
      ds[i] = frozen[i] ? 0.0 : f[i] - rho;
      psi += f[i] - rho;
    }
    ds[n] = psi;
  };
  IntegrationOptions local = opts;
  local.store_states = false;
  local.observer = nullptr;
  const GenericResult res = integrate_rhs(rhs, state, 0.0, t_end, local);
  if (!res.completed) throw Error(ErrorCode::InvalidArgument, "psi integration failed: " + res.message);
  return res.states.back()[n] / t_end;
}

std::string_view to_string(PermanenceOutcome o) {
  switch (o) {
    case PermanenceOutcome::LikelyPermanent: return "LikelyPermanent";
    case PermanenceOutcome::NotPermanent: return "NotPermanent";
    case PermanenceOutcome::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

std::string_view to_string(FollowUp f) {
  switch (f) {
    case FollowUp::NotRun: return "NotRun";
    case FollowUp::Settled: return "Settled";
    case FollowUp::Decaying: return "Decaying";
    case FollowUp::Unresolved: return "Unresolved";
  }
  return "Unknown";
}

namespace {

nlohmann::json finite_or_null(double v, int digits = 12) {
  return std::isfinite(v) ? nlohmann::json(round_significant(v, digits)) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const PermanenceOptions& o) {
  return {{"t_end", o.t_end},
          {"window_fraction", o.window_fraction},
          {"boundary_offset", o.boundary_offset},
          {"delta", o.delta},
          {"fail_bound", o.fail_bound},
          {"random_starts", o.random_starts},
          {"max_face_dimension", o.max_face_dimension},
          {"max_face_codimension", o.max_face_codimension},
          {"seed", o.seed},
          {"rtol", o.rtol},
          {"atol", o.atol},
          {"extension_factor", o.extension_factor},
          {"settle_tolerance", o.settle_tolerance},
          {"numeric_only", o.numeric_only}};
}

nlohmann::json to_json(const PermanenceVerdict& v, bool include_trials) {
  nlohmann::json j = {{"outcome", to_string(v.outcome)},
                      {"witness", v.witness.empty() ? nlohmann::json(nullptr) : nlohmann::json(v.witness)},
                      {"delta_estimate", finite_or_null(v.delta_estimate)},
                      {"floor_estimate", finite_or_null(v.floor_estimate)},
                      {"extended", v.extended},
                      {"trials", v.trials},
                      {"parameters", to_json(v.parameters)}};
  if (v.witness_trial) {
    const PermanenceTrial& t = v.trial_results[*v.witness_trial];
    j["witness_trial"] = {{"label", t.label},
                          {"x0", vector_to_json(t.x0)},
                          {"late_min", finite_or_null(t.late_min)},
                          {"trend", finite_or_null(t.trend)},
                          {"follow_up", to_string(t.follow_up)},
                          {"follow_up_horizon", t.follow_up_horizon},
                          {"floor", finite_or_null(std::exp(t.floor_log))}};
  }
  if (v.equilibria) j["equilibria"] = to_json(*v.equilibria);
  if (include_trials) {
    nlohmann::json list = nlohmann::json::array();
    for (const PermanenceTrial& t : v.trial_results)
      list.push_back({{"label", t.label},
                      {"late_min", finite_or_null(t.late_min)},
                      {"overall_min", finite_or_null(std::exp(t.overall_min_log))},
                      {"trend", finite_or_null(t.trend)},
                      {"termination", to_string(t.termination)},
                      {"follow_up", to_string(t.follow_up)}});
    j["trial_results"] = std::move(list);
  }
  return j;
}

}  // namespace hyperchain
