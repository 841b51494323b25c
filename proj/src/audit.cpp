#include "hyperchain/audit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "hyperchain/equilibria.hpp"
#include "hyperchain/generators.hpp"
#include "hyperchain/graph_analysis.hpp"
#include "hyperchain/network_io.hpp"
#include "hyperchain/parallel.hpp"
#include "hyperchain/random.hpp"
#include "hyperchain/stability.hpp"

namespace hyperchain {

std::string_view audit_check_description(char check) {
  switch (check) {
    case 'a': return "cycle graph => LikelyPermanent";
    case 'b': return "Hamiltonian => certificate rates LikelyPermanent";
    case 'c': return "LikelyPermanent => strongly connected and positive equilibrium";
    case 'd': return "unrooted <=> constructed positive equilibrium; rooted => Empty";
    case 'e': return "spanning linear subgraph <=> some K gives Unique";
    case 'f': return "LinearlyStable <=> property P";
    case 'g': return "Unique => spanning linear subgraph; Continuum never LinearlyStable";
    case 'h': return "Hamiltonian => spanning linear subgraph and strongly connected";
    case 'i': return "single-parity spanning linear subgraphs => never Continuum";
  }
  return "unknown check";
}

namespace {

std::size_t check_index(char c) {
  return static_cast<std::size_t>(std::find(kAuditChecks.begin(), kAuditChecks.end(), c) - kAuditChecks.begin());
}

CheckResult pass(char c, std::string evidence = {}) { return {c, CheckOutcome::Pass, std::move(evidence), {}}; }
CheckResult fail(char c, std::string evidence, std::optional<Matrix> rates = {}) {
  return {c, CheckOutcome::Fail, std::move(evidence), std::move(rates)};
}
CheckResult not_applicable(char c, std::string evidence = {}) {
  return {c, CheckOutcome::NotApplicable, std::move(evidence), {}};
}

CheckResult from_verdict(char c, const PermanenceVerdict& v, const char* what) {
  std::string ev = std::string(what) + ": " + std::string(to_string(v.outcome));
  if (v.outcome == PermanenceOutcome::LikelyPermanent) return pass(c, ev);
  if (v.outcome == PermanenceOutcome::Inconclusive) return {c, CheckOutcome::Inconclusive, ev, {}};
  return fail(c, ev + " (witness: " + v.witness + ")");
}

// The "for all K" probes: the sampled K, all ones, small integers (which can
// make det K vanish) and log-uniform draws.
std::vector<Matrix> rate_probes(const HyperchainSystem& sys, std::uint64_t sample_seed, const AuditOptions& opts) {
  const Hyperchain& h = sys.graph();
  const Matrix a = h.adjacency();
  std::vector<Matrix> out{sys.K(), a};
  Rng rng(derive_seed(sample_seed, 0x72617465ULL));
  for (int d = 0; d < opts.integer_draws; ++d) {
    Matrix k = Matrix::Zero(h.size(), h.size());
    for (const Edge& e : h.edges()) k(e.tail, e.head) = uniform_int(rng, 1, 3);
    out.push_back(std::move(k));
  }
  for (int d = 0; d < opts.rate_draws; ++d) out.push_back(random_rates(h, rng).entries());
  return out;
}

std::string kind_name(const EquilibriumSet& s) { return std::string(to_string(s.kind)); }

}  // namespace

std::vector<CheckResult> audit_instance(const HyperchainSystem& sys, std::uint64_t sample_seed,
                                        const AuditOptions& opts, std::optional<SoftOutcome>* soft,
                                        std::string* soft_evidence) {
  const Hyperchain& h = sys.graph();
  const int n = h.size();
  const bool sc = is_strongly_connected(h);
  const bool rooted = is_rooted(h);
  const bool has_sls = has_spanning_linear_subgraph(h);
  const HamiltonianSearch ham = find_hamiltonian_cycle(h);
  const bool hamiltonian = ham.status == SearchStatus::Found;
  const bool cycle = is_cycle_graph(h);

  PermanenceOptions popts = opts.permanence;
  popts.seed = derive_seed(sample_seed, 0x7065726dULL);
  popts.threads = 1;

  const std::vector<Matrix> probes = rate_probes(sys, sample_seed, opts);
  std::vector<EquilibriumSet> eqs;
  eqs.reserve(probes.size());
  for (const Matrix& k : probes) eqs.push_back(positive_equilibria(k));
  const EquilibriumSet& sampled_eq = eqs.front();

  std::vector<CheckResult> out;

  // (a)
  if (cycle) {
    out.push_back(from_verdict('a', numeric_permanence_test(sys, popts), "sampled K"));
  } else {
    out.push_back(not_applicable('a'));
  }

  // (b) and the certificate verdict, which also feeds (c).
  std::optional<PermanenceVerdict> certificate_verdict;
  std::optional<Matrix> certificate;
  if (hamiltonian) {
    certificate = hamiltonian_permanence_rates(h).entries();
    certificate_verdict = numeric_permanence_test(HyperchainSystem(h, RateMatrix(*certificate)), popts);
    CheckResult r = from_verdict('b', *certificate_verdict, "certificate rates");
    if (r.outcome == CheckOutcome::Fail) r.rates = certificate;
    out.push_back(std::move(r));
  } else {
    out.push_back(not_applicable('b', ham.status == SearchStatus::Inconclusive ? "Hamiltonian search inconclusive" : ""));
  }

  // (c): integrate without the theorem short-cuts, so the premise is decided numerically.
  {
    PermanenceOptions numeric = popts;
    numeric.numeric_only = true;
    const PermanenceVerdict v = numeric_permanence_test(sys, numeric);
    std::vector<std::pair<const PermanenceVerdict*, std::optional<Matrix>>> premises;
    premises.push_back({&v, std::nullopt});
    if (certificate_verdict) premises.push_back({&*certificate_verdict, certificate});
    CheckResult r = not_applicable('c');
    for (const auto& [verdict, rates] : premises) {
      if (verdict->outcome != PermanenceOutcome::LikelyPermanent) continue;
      const EquilibriumSet eq = rates ? positive_equilibria(*rates) : sampled_eq;
      if (!sc || eq.kind == EquilibriumKind::Empty) {
        r = fail('c', std::string("LikelyPermanent but ") + (!sc ? "not strongly connected" : "no positive equilibrium"),
                 rates);
        break;
      }
      r = pass('c', hamiltonian ? "" : "LikelyPermanent without a Hamiltonian cycle");
    }
    out.push_back(std::move(r));

    if (soft && !sc && sampled_eq.kind == EquilibriumKind::Unique) {
      if (v.outcome == PermanenceOutcome::LikelyPermanent)
        *soft = SoftOutcome::Contradicted;
      else if (v.outcome == PermanenceOutcome::NotPermanent)
        *soft = SoftOutcome::Detected;
      else
        *soft = SoftOutcome::Undetected;
      if (soft_evidence)
        *soft_evidence = "numeric verdict " + std::string(to_string(v.outcome)) + ", floor " +
                         format_shortest(v.floor_estimate);
    }
  }

  // (d)
  if (!rooted) {
    try {
      const RateMatrix k = construct_existence_rates(h);
      const EquilibriumSet eq = positive_equilibria(k.entries());
      if (eq.kind == EquilibriumKind::Empty || !eq.point ||
          equilibrium_residual(k.entries(), *eq.point) > kResidualTolerance)
        out.push_back(fail('d', "unrooted but constructed rates give " + kind_name(eq), k.entries()));
      else
        out.push_back(pass('d', "constructed rates give " + kind_name(eq)));
    } catch (const Error& e) {
      out.push_back(fail('d', std::string("unrooted but construction failed: ") + e.what()));
    }
  } else {
    bool threw = false;
    try {
      construct_existence_rates(h);
    } catch (const Error& e) {
      threw = e.code() == ErrorCode::RootedGraph;
    }
    std::optional<std::size_t> bad;
    for (std::size_t p = 0; p < eqs.size() && !bad; ++p)
      if (eqs[p].kind != EquilibriumKind::Empty) bad = p;
    if (bad)
      out.push_back(fail('d', "rooted but probe " + std::to_string(*bad) + " gives " + kind_name(eqs[*bad]),
                         probes[*bad]));
    else if (!threw)
      out.push_back(fail('d', "rooted but construct_existence_rates did not refuse"));
    else
      out.push_back(pass('d', "rooted; all probes Empty"));
  }

  // (e)
  if (has_sls) {
    try {
      const RateMatrix k = construct_uniqueness_rates(h);
      const EquilibriumSet eq = positive_equilibria(k.entries());
      if (eq.kind == EquilibriumKind::Unique)
        out.push_back(pass('e', "constructed rates give Unique"));
      else
        out.push_back(fail('e', "constructed rates give " + kind_name(eq), k.entries()));
    } catch (const Error& e) {
      out.push_back(fail('e', std::string("construction failed: ") + e.what()));
    }
  } else {
    std::optional<std::size_t> bad;
    for (std::size_t p = 0; p < eqs.size() && !bad; ++p)
      if (eqs[p].kind == EquilibriumKind::Unique) bad = p;
    if (bad)
      out.push_back(fail('e', "no spanning linear subgraph but probe " + std::to_string(*bad) + " gives Unique",
                         probes[*bad]));
    else
      out.push_back(pass('e', "no spanning linear subgraph; no probe Unique"));
  }

  // (f) and (g) over the probes.
  {
    CheckResult f = not_applicable('f');
    CheckResult g = not_applicable('g');
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const EquilibriumSet& eq = eqs[p];
      if (eq.kind == EquilibriumKind::Unique) {
        const StabilityReport rep = classify_positive_stability(probes[p], *eq.point);
        const bool stable = rep.classification == StabilityClass::LinearlyStable;
        const bool p_holds = property_p(probes[p]).holds();
        if (stable != p_holds) {
          if (f.outcome != CheckOutcome::Fail)
            f = fail('f', "probe " + std::to_string(p) + ": classification " +
                              std::string(to_string(rep.classification)) + ", property P " +
                              (p_holds ? "holds" : "fails"),
                     probes[p]);
        } else if (f.outcome == CheckOutcome::NotApplicable) {
          f = pass('f');
        }
        if (!has_sls) {
          if (g.outcome != CheckOutcome::Fail)
            g = fail('g', "probe " + std::to_string(p) + " Unique without a spanning linear subgraph", probes[p]);
        } else if (g.outcome == CheckOutcome::NotApplicable) {
          g = pass('g');
        }
      } else if (eq.kind == EquilibriumKind::Continuum && eq.point) {
        const StabilityReport rep = classify_positive_stability(probes[p], *eq.point);
        if (rep.classification == StabilityClass::LinearlyStable) {
          if (g.outcome != CheckOutcome::Fail)
            g = fail('g', "probe " + std::to_string(p) + ": LinearlyStable point on a Continuum", probes[p]);
        } else if (g.outcome == CheckOutcome::NotApplicable) {
          g = pass('g');
        }
      }
    }
    out.push_back(std::move(f));
    out.push_back(std::move(g));
  }

  // (h)
  if (hamiltonian) {
    if (has_sls && sc)
      out.push_back(pass('h'));
    else
      out.push_back(fail('h', std::string("Hamiltonian but ") + (has_sls ? "not strongly connected"
                                                                          : "no spanning linear subgraph")));
  } else {
    out.push_back(not_applicable('h'));
  }

  // (i)
  if (has_sls && n <= kEnumerationBound) {
    const auto subgraphs = enumerate_spanning_linear_subgraphs(h, kProfileEnumerationCap);
    if (subgraphs.size() < kProfileEnumerationCap && same_parity(subgraphs)) {
      std::optional<std::size_t> bad;
      for (std::size_t p = 0; p < eqs.size() && !bad; ++p)
        if (eqs[p].kind == EquilibriumKind::Continuum || !eqs[p].invertible) bad = p;
      if (bad)
        out.push_back(fail('i', "single parity but probe " + std::to_string(*bad) + " gives " + kind_name(eqs[*bad]) +
                                    (eqs[*bad].invertible ? "" : " with singular K"),
                           probes[*bad]));
      else
        out.push_back(pass('i', std::to_string(subgraphs.size()) + " subgraphs of one parity"));
    } else {
      out.push_back(not_applicable('i', "mixed parity"));
    }
  } else {
    out.push_back(not_applicable('i'));
  }

  if (opts.inject) {
    for (CheckResult& r : out)
      if (r.check == *opts.inject && r.outcome == CheckOutcome::Pass) {
        r.outcome = CheckOutcome::Fail;
        r.evidence = "injected violation (was: pass" + (r.evidence.empty() ? "" : ", " + r.evidence) + ")";
      }
  }
  return out;
}

namespace {

struct Drawn {
  std::string family;
  HyperchainSystem system;
};

Drawn draw_sample(std::uint64_t sample_seed, const AuditOptions& opts) {
  Rng rng(sample_seed);
  const int n = uniform_int(rng, opts.n_min, opts.n_max);
  const double u = uniform01(rng);
  std::string family;
  std::optional<Hyperchain> h;
  if (u < 0.15) {
    family = "cycle";
    h = shuffle_labels(cycle_graph(n), rng);
  } else if (u < 0.5) {
    family = "hamiltonian-plus-chords";
    const bool loops = n == 2 || bernoulli(rng, 0.2);
    const int available = n * (n - 2) + (loops ? n : 0);
    const int chords = uniform_int(rng, 1, std::min(n, available));
    h = shuffle_labels(hamiltonian_plus_chords(n, chords, rng, loops), rng);
  } else {
    family = "random";
    h = random_hyperchain(n, uniform(rng, 0.2, 0.6), rng, 0.1);
  }
  HyperchainSystem sys = random_system(*h, rng);
  return {family, std::move(sys)};
}

}  // namespace

AuditReport implication_audit(const AuditOptions& opts) {
  if (opts.n_min < 1 || opts.n_max < opts.n_min || opts.n_max > 8)
    throw Error(ErrorCode::InvalidArgument, "species range must satisfy 1 <= n_min <= n_max <= 8");
  if (opts.samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be at least 1");

  AuditReport report;
  report.options = opts;
  const int total = opts.samples + (opts.include_example_six ? 1 : 0);
  // Injection is applied after the merge so that exactly one instance is corrupted.
  AuditOptions run_opts = opts;
  run_opts.inject.reset();

  std::vector<std::optional<AuditSample>> slots(total);
  parallel_for(static_cast<std::size_t>(total), opts.threads, [&](std::size_t i) {
    const std::uint64_t sample_seed = derive_seed(opts.seed, i);
    std::optional<Drawn> drawn;
    if (static_cast<int>(i) < opts.samples)
      drawn = draw_sample(sample_seed, opts);
    else
      drawn = Drawn{"example-six", example_six()};
    std::optional<SoftOutcome> soft;
    std::string soft_evidence;
    std::vector<CheckResult> results = audit_instance(drawn->system, sample_seed, run_opts, &soft, &soft_evidence);
    slots[i] = AuditSample{static_cast<int>(i), drawn->family, sample_seed, drawn->system, std::move(results), soft,
                           std::move(soft_evidence)};
  });

  bool injected = false;
  for (auto& slot : slots) {
    AuditSample& s = *slot;
    for (CheckResult& r : s.results) {
      if (opts.inject && !injected && r.check == *opts.inject && r.outcome == CheckOutcome::Pass) {
        r.outcome = CheckOutcome::Fail;
        r.evidence = "injected violation (was: pass" + (r.evidence.empty() ? "" : ", " + r.evidence) + ")";
        injected = true;
        report.violations.push_back({r.check, s.index, s.sample_seed, s.family, r.evidence, true, s.system, r.rates, {}});
        ++report.tallies[check_index(r.check)].fail;
        continue;
      }
      CheckTally& t = report.tallies[check_index(r.check)];
      switch (r.outcome) {
        case CheckOutcome::Pass: ++t.pass; break;
        case CheckOutcome::Fail:
          ++t.fail;
          report.violations.push_back({r.check, s.index, s.sample_seed, s.family, r.evidence, false, s.system, r.rates, {}});
          break;
        case CheckOutcome::Inconclusive: ++t.inconclusive; break;
        case CheckOutcome::NotApplicable: ++t.not_applicable; break;
      }
    }
    if (s.soft) {
      if (*s.soft == SoftOutcome::Detected) ++report.soft_detected;
      else if (*s.soft == SoftOutcome::Undetected) ++report.soft_undetected;
      else ++report.soft_contradicted;
    }
    report.samples.push_back(std::move(s));
  }
  return report;
}

void write_audit_dumps(AuditReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t v = 0; v < report.violations.size(); ++v) {
    AuditViolation& viol = report.violations[v];
    const std::string stem = "violation-" + std::to_string(v + 1) + "-" + viol.check;
    const std::filesystem::path file = dir / (stem + ".hc");
    std::ostringstream comment;
    comment << "audit check " << viol.check << ", sample " << viol.sample << ", sample seed " << viol.sample_seed
            << ", family " << viol.family;
    std::ofstream(file) << format_network_text(viol.system, comment.str());
    viol.dump_file = file.string();

    std::string replay = "hyperchain audit --replay " + file.string() + " --sample-seed " +
                         std::to_string(viol.sample_seed);
    if (viol.injected) replay += std::string(" --inject-violation ") + viol.check;
    nlohmann::json entry = {{"check", std::string(1, viol.check)},
                            {"description", audit_check_description(viol.check)},
                            {"sample", viol.sample},
                            {"sample_seed", viol.sample_seed},
                            {"family", viol.family},
                            {"evidence", viol.evidence},
                            {"injected", viol.injected},
                            {"file", file.filename().string()},
                            {"replay", replay}};
    if (viol.witness_rates) {
      const std::filesystem::path wfile = dir / (stem + "-witness.hc");
      std::ofstream(wfile) << format_network_text(
          HyperchainSystem(viol.system.graph(), RateMatrix(*viol.witness_rates)),
          "rates that produced the evidence for check " + std::string(1, viol.check));
      entry["witness_file"] = wfile.filename().string();
    }
    entries.push_back(std::move(entry));
  }
  const AuditOptions& o = report.options;
  nlohmann::json manifest = {{"seed", o.seed},
                             {"n_min", o.n_min},
                             {"n_max", o.n_max},
                             {"samples", o.samples},
                             {"rate_draws", o.rate_draws},
                             {"integer_draws", o.integer_draws},
                             {"epsilon", 1e-3},
                             {"permanence", to_json(o.permanence)},
                             {"violations", std::move(entries)}};
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
}

std::string_view to_string(CheckOutcome o) {
  switch (o) {
    case CheckOutcome::Pass: return "pass";
    case CheckOutcome::Fail: return "fail";
    case CheckOutcome::Inconclusive: return "inconclusive";
    case CheckOutcome::NotApplicable: return "not_applicable";
  }
  return "unknown";
}

std::string_view to_string(SoftOutcome o) {
  switch (o) {
    case SoftOutcome::Detected: return "detected";
    case SoftOutcome::Undetected: return "undetected";
    case SoftOutcome::Contradicted: return "contradicted";
  }
  return "unknown";
}

nlohmann::json to_json(const AuditReport& report, bool include_samples) {
  const AuditOptions& o = report.options;
  nlohmann::json checks = nlohmann::json::object();
  for (std::size_t c = 0; c < kAuditChecks.size(); ++c) {
    const CheckTally& t = report.tallies[c];
    checks[std::string(1, kAuditChecks[c])] = {{"description", audit_check_description(kAuditChecks[c])},
                                               {"pass", t.pass},
                                               {"fail", t.fail},
                                               {"inconclusive", t.inconclusive},
                                               {"not_applicable", t.not_applicable}};
  }
  nlohmann::json violations = nlohmann::json::array();
  for (const AuditViolation& v : report.violations) {
    nlohmann::json j = {{"check", std::string(1, v.check)},
                        {"sample", v.sample},
                        {"sample_seed", v.sample_seed},
                        {"family", v.family},
                        {"evidence", v.evidence},
                        {"injected", v.injected},
                        {"network", network_to_json(v.system)}};
    if (v.witness_rates) j["witness_network"] = network_to_json(HyperchainSystem(v.system.graph(), RateMatrix(*v.witness_rates)));
    if (!v.dump_file.empty()) j["dump_file"] = v.dump_file;
    violations.push_back(std::move(j));
  }
  std::map<std::string, int> families;
  for (const AuditSample& s : report.samples) ++families[s.family];

  nlohmann::json j = {
      {"parameters",
       {{"n_min", o.n_min},
        {"n_max", o.n_max},
        {"samples", o.samples},
        {"seed", o.seed},
        {"rate_draws", o.rate_draws},
        {"integer_draws", o.integer_draws},
        {"include_example_six", o.include_example_six},
        {"inject", o.inject ? nlohmann::json(std::string(1, *o.inject)) : nlohmann::json(nullptr)},
        {"permanence", to_json(o.permanence)}}},
      {"instances", report.samples.size()},
      {"families", families},
      {"checks", std::move(checks)},
      {"violation_count", report.violations.size()},
      {"violations", std::move(violations)},
      {"soft_check",
       {{"description", "not strongly connected with a unique positive equilibrium => persistence failure detected"},
        {"detected", report.soft_detected},
        {"undetected", report.soft_undetected},
        {"contradicted", report.soft_contradicted}}}};
  if (include_samples) {
    nlohmann::json list = nlohmann::json::array();
    for (const AuditSample& s : report.samples) {
      nlohmann::json r = nlohmann::json::object();
      for (const CheckResult& c : s.results) {
        nlohmann::json e = {{"outcome", to_string(c.outcome)}};
        if (!c.evidence.empty()) e["evidence"] = c.evidence;
        r[std::string(1, c.check)] = std::move(e);
      }
      nlohmann::json entry = {{"index", s.index}, {"family", s.family}, {"sample_seed", s.sample_seed},
                              {"n", s.system.size()}, {"edges", s.system.graph().edge_count()}, {"checks", std::move(r)}};
      if (s.soft) entry["soft_check"] = {{"outcome", to_string(*s.soft)}, {"evidence", s.soft_evidence}};
      list.push_back(std::move(entry));
    }
    j["samples"] = std::move(list);
  }
  return j;
}

}  // namespace hyperchain
