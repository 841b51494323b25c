#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "hyperchain/audit.hpp"
#include "hyperchain/dynamics.hpp"
#include "hyperchain/generators.hpp"
#include "hyperchain/network_io.hpp"
#include "hyperchain/report.hpp"

namespace hyperchain::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Failure outside the library's own error codes (I/O, bad flag values).
struct CliError {
  std::string code;
  std::string message;
  int exit_code = 2;
};

struct Shared {
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string format = "json";
};

void add_shared(CLI::App* sub, Shared& s, std::uint64_t default_seed, const std::string& default_format) {
  s.seed = default_seed;
  s.format = default_format;
  sub->add_option("--out", s.out, "Write the result to this file instead of stdout");
  sub->add_option("--seed", s.seed, "Random seed")->capture_default_str();
  sub->add_option("--threads", s.threads, "Worker cap (0: hardware concurrency)")->capture_default_str();
  sub->add_option("--format", s.format, "Output format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
}

void add_permanence_flags(CLI::App* sub, PermanenceOptions& p) {
  sub->add_option("--trials", p.random_starts, "Random near-boundary starts")->capture_default_str();
  sub->add_option("--t-end", p.t_end, "Integration horizon")->capture_default_str();
  sub->add_option("--window-fraction", p.window_fraction, "Late window as a fraction of the horizon")->capture_default_str();
  sub->add_option("--boundary-offset", p.boundary_offset, "Inward offset of near-boundary starts")->capture_default_str();
  sub->add_option("--delta", p.delta, "LikelyPermanent threshold")->capture_default_str();
  sub->add_option("--fail-bound", p.fail_bound, "NotPermanent threshold")->capture_default_str();
  sub->add_option("--max-face-dimension", p.max_face_dimension)->capture_default_str();
  sub->add_option("--max-face-codimension", p.max_face_codimension)->capture_default_str();
  sub->add_option("--extension-factor", p.extension_factor, "Horizon cap for the follow-up, in units of --t-end")->capture_default_str();
  sub->add_option("--settle-tolerance", p.settle_tolerance, "Follow-up settling tolerance on ln min x")->capture_default_str();
  sub->add_option("--rtol", p.rtol)->capture_default_str();
  sub->add_option("--atol", p.atol)->capture_default_str();
  sub->add_flag("--numeric-only", p.numeric_only, "Skip the graph and equilibrium short-circuits");
}

std::string read_input(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{"IoError", "cannot read " + path, 2};
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CliError{"IoError", "cannot write " + path.string(), 1};
  f << text;
  if (!f) throw CliError{"IoError", "write failed for " + path.string(), 1};
}

void emit(const Shared& s, std::ostream& out, const std::string& text) {
  if (s.out.empty())
    out << text;
  else
    write_file(s.out, text);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used == 0 || used != item.size())
      throw CliError{"Usage", "cannot parse vector entry '" + item + "'", 2};
    v.push_back(x);
  }
  if (v.empty()) throw CliError{"Usage", "empty vector", 2};
  return v;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotAnEquilibrium:
    case ErrorCode::Lambda1NotFound:
    case ErrorCode::NotAnEigenpair:
      return 1;
    default:
      return 2;
  }
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// analyze -------------------------------------------------------------------

struct AnalyzeArgs {
  Shared shared;
  std::string file;
  bool permanence = false;
  PermanenceOptions perm;
};

void cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const std::string text = read_input(a.file);
  const HyperchainSystem sys = parse_network(text);
  AnalysisOptions opts;
  opts.permanence = a.permanence;
  opts.permanence_options = a.perm;
  opts.permanence_options.seed = a.shared.seed;
  opts.permanence_options.threads = a.shared.threads;
  const AnalysisReport report = analyze_system(sys, text, opts);
  emit(a.shared, out, a.shared.format == "json" ? dump(to_json(report)) : to_text(report));
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
  Shared shared;
  std::string file;
  std::string mode = "rel";
  std::string x0;
  double t_end = 10.0;
  bool normalize = false;
  double blow_up_threshold = std::numeric_limits<double>::infinity();
  double rtol = 1e-8;
  double atol = 1e-10;
  std::string stepper = "dopri5";
  double fixed_step = 1e-3;
  std::string sidecar;
};

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const std::string text = read_input(a.file);
  const HyperchainSystem sys = parse_network(text);
  const int n = sys.size();
  const Mode mode = a.mode == "abs" ? Mode::Absolute : Mode::Relative;

  Vector x0;
  if (a.x0.empty()) {
    x0 = mode == Mode::Relative ? Vector::Constant(n, 1.0 / n) : Vector::Ones(n);
  } else {
    const std::vector<double> v = parse_vector(a.x0);
    if (static_cast<int>(v.size()) != n)
      throw Error(ErrorCode::DimensionMismatch, "x0 has " + std::to_string(v.size()) + " entries, network has " +
                                                    std::to_string(n) + " species");
    x0 = Eigen::Map<const Vector>(v.data(), n);
  }
  if (mode == Mode::Relative) {
    if (a.normalize) {
      x0 = to_relative(x0).x;
    } else if (std::abs(x0.sum() - 1.0) > 1e-9) {
      throw Error(ErrorCode::InvalidArgument, "relative mode needs x0 on the simplex (sum " +
                                                  format_shortest(x0.sum()) + "); pass --normalize to rescale");
    }
  }

  IntegrationOptions io;
  io.rtol = a.rtol;
  io.atol = a.atol;
  io.blow_up_threshold = a.blow_up_threshold;
  io.stepper = a.stepper == "rk4" ? Stepper::FixedRk4 : Stepper::DormandPrince;
  io.fixed_step = a.fixed_step;
  const Trajectory traj = integrate(sys, mode, x0, a.t_end, io);

  json x0j = json::array();
  for (double v : x0) x0j.push_back(v);
  json side = trajectory_summary(traj);
  side["x0"] = std::move(x0j);
  side["t_end"] = a.t_end;
  side["input_hash"] = input_hash(text);
  side["version"] = std::string(version());
  side["options"] = {{"rtol", io.rtol},
                     {"atol", io.atol},
                     {"stepper", a.stepper},
                     {"fixed_step", io.fixed_step},
                     {"blow_up_threshold", number_or_null(io.blow_up_threshold)}};

  std::string sidecar_path = a.sidecar;
  if (a.shared.out.empty()) {
    out << trajectory_csv(traj);
  } else {
    write_file(a.shared.out, trajectory_csv(traj));
    side["csv"] = fs::path(a.shared.out).filename().string();
    if (sidecar_path.empty()) sidecar_path = fs::path(a.shared.out).replace_extension(".json").string();
  }
  if (!sidecar_path.empty()) write_file(sidecar_path, dump(side));
  if (!a.shared.out.empty()) {
    if (a.shared.format == "json") {
      out << dump(side);
    } else {
      out << "termination " << to_string(traj.termination) << ", final time " << format_shortest(traj.final_time);
      if (traj.termination == Termination::BlowUp) out << ", time estimate " << format_shortest(traj.time_estimate);
      out << '\n';
    }
  }
}

// permanence ----------------------------------------------------------------

struct PermanenceArgs {
  Shared shared;
  std::string file;
  PermanenceOptions perm;
  bool summary = false;
};

void cmd_permanence(const PermanenceArgs& a, std::ostream& out) {
  const std::string text = read_input(a.file);
  const HyperchainSystem sys = parse_network(text);
  PermanenceOptions opts = a.perm;
  opts.seed = a.shared.seed;
  opts.threads = a.shared.threads;
  const PermanenceVerdict v = numeric_permanence_test(sys, opts);
  if (a.shared.format == "json") {
    json j = to_json(v, !a.summary);
    j["input_hash"] = input_hash(text);
    j["version"] = std::string(version());
    emit(a.shared, out, dump(j));
    return;
  }
  std::ostringstream os;
  os << to_string(v.outcome);
  if (!v.witness.empty()) os << " (" << v.witness << ')';
  os << "\ntrials " << v.trials << ", delta estimate " << format_shortest(v.delta_estimate) << ", floor estimate "
     << format_shortest(v.floor_estimate) << '\n';
  emit(a.shared, out, os.str());
}

// gen -----------------------------------------------------------------------

struct GenArgs {
  Shared shared;
  std::string type;
  int n = 0;
  int chords = -1;
  double edge_probability = 0.4;
  double loop_probability = 0.0;
  std::string rates;
  double epsilon = 1e-3;
  double rate_min = 0.1;
  double rate_max = 10.0;
  double k3 = 0.5;
  double k5 = 2.0;
};

HyperchainSystem generate(const GenArgs& a) {
  if (a.type == "example-five") return example_five(a.k3, a.k5);
  if (a.type == "example-six") return example_six();
  if (a.n < 1) throw CliError{"Usage", "--n must be a positive integer for --type " + a.type, 2};

  Rng rng(derive_seed(a.shared.seed, 0x67656e));
  std::optional<Hyperchain> h;
  if (a.type == "cycle") {
    h = cycle_graph(a.n);
  } else if (a.type == "hamiltonian-plus-chords") {
    if (a.n < 2) throw CliError{"Usage", "hamiltonian-plus-chords needs --n >= 2", 2};
    const bool loops = a.loop_probability > 0.0;
    const int available = a.n * (a.n - 2) + (loops ? a.n : 0);
    int chords = a.chords;
    if (chords < 0) chords = available == 0 ? 0 : uniform_int(rng, 1, std::min(a.n, available));
    if (chords > available)
      throw CliError{"Usage", "--chords " + std::to_string(chords) + " exceeds the " + std::to_string(available) +
                                  " available non-cycle edges",
                     2};
    h = hamiltonian_plus_chords(a.n, chords, rng, loops);
  } else {
    if (!(a.edge_probability >= 0.0 && a.edge_probability <= 1.0) ||
        !(a.loop_probability >= 0.0 && a.loop_probability <= 1.0))
      throw CliError{"Usage", "probabilities must lie in [0, 1]", 2};
    h = random_hyperchain(a.n, a.edge_probability, rng, a.loop_probability);
  }

  const std::string rates = a.rates.empty() ? (a.type == "cycle" ? "unit" : "random") : a.rates;
  if (rates == "unit") return HyperchainSystem::uniform(*h);
  if (rates == "random") {
    if (!(a.rate_min > 0.0 && a.rate_max >= a.rate_min))
      throw CliError{"Usage", "need 0 < --rate-min <= --rate-max", 2};
    return random_system(*h, rng, a.rate_min, a.rate_max);
  }
  if (rates == "existence") return HyperchainSystem(*h, construct_existence_rates(*h));
  if (rates == "uniqueness") return HyperchainSystem(*h, construct_uniqueness_rates(*h, a.epsilon));
  if (rates == "certificate") return HyperchainSystem(*h, hamiltonian_permanence_rates(*h));
  return HyperchainSystem(*h, nonpermanence_rates(*h, a.epsilon).rates);
}

std::string gen_comment(const GenArgs& a) {
  std::ostringstream os;
  os << "hyperchain gen --type " << a.type;
  if (a.type == "example-five") {
    os << " --k3 " << format_shortest(a.k3) << " --k5 " << format_shortest(a.k5);
  } else if (a.type != "example-six") {
    os << " --n " << a.n << " --seed " << a.shared.seed;
    if (!a.rates.empty()) os << " --rates " << a.rates;
  }
  return os.str();
}

void cmd_gen(const GenArgs& a, std::ostream& out) {
  if (!a.rates.empty() && (a.type == "example-five" || a.type == "example-six"))
    throw CliError{"Usage", "--rates does not apply to the worked examples", 2};
  const HyperchainSystem sys = generate(a);
  emit(a.shared, out, a.shared.format == "json" ? dump(network_to_json(sys)) : format_network_text(sys, gen_comment(a)));
}

// audit ---------------------------------------------------------------------

struct AuditArgs {
  Shared shared;
  AuditOptions audit;
  std::string inject;
  std::string dump_dir = "audit-dumps";
  bool include_samples = false;
  bool no_example_six = false;
  std::string replay;
  std::uint64_t sample_seed = 0;
  PermanenceOptions perm;
};

json check_results_json(const std::vector<CheckResult>& results) {
  json j = json::object();
  for (const CheckResult& c : results) {
    json e = {{"outcome", to_string(c.outcome)}, {"description", audit_check_description(c.check)}};
    if (!c.evidence.empty()) e["evidence"] = c.evidence;
    if (c.rates) {
      json rows = json::array();
      for (Eigen::Index i = 0; i < c.rates->rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < c.rates->cols(); ++k) row.push_back((*c.rates)(i, k));
        rows.push_back(std::move(row));
      }
      e["rates"] = std::move(rows);
    }
    j[std::string(1, c.check)] = std::move(e);
  }
  return j;
}

std::optional<char> parse_check(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s.size() != 1 || s[0] < 'a' || s[0] > 'i')
    throw CliError{"Usage", "--inject-violation expects one of a..i", 2};
  return s[0];
}

void cmd_audit_replay(const AuditArgs& a, std::ostream& out) {
  const std::string text = read_input(a.replay);
  const HyperchainSystem sys = parse_network(text);
  AuditOptions opts = a.audit;
  opts.permanence = a.perm;
  opts.threads = a.shared.threads;
  opts.permanence.threads = 1;
  std::optional<SoftOutcome> soft;
  std::string soft_evidence;
  const std::vector<CheckResult> results = audit_instance(sys, a.sample_seed, opts, &soft, &soft_evidence);
  int violations = 0;
  for (const CheckResult& c : results)
    if (c.outcome == CheckOutcome::Fail) ++violations;
  json j = {{"replay", fs::path(a.replay).filename().string()},
            {"sample_seed", a.sample_seed},
            {"checks", check_results_json(results)},
            {"violation_count", violations},
            {"soft_check", soft ? json{{"outcome", to_string(*soft)}, {"evidence", soft_evidence}} : json(nullptr)}};
  if (a.shared.format == "json") {
    emit(a.shared, out, dump(j));
    return;
  }
  std::ostringstream os;
  for (const CheckResult& c : results)
    os << c.check << ' ' << to_string(c.outcome) << (c.evidence.empty() ? "" : ": " + c.evidence) << '\n';
  os << "violations " << violations << '\n';
  emit(a.shared, out, os.str());
}

void cmd_audit(AuditArgs a, std::ostream& out) {
  a.audit.inject = parse_check(a.inject);
  if (!a.replay.empty()) {
    cmd_audit_replay(a, out);
    return;
  }
  if (a.audit.n_min < 1 || a.audit.n_max < a.audit.n_min)
    throw CliError{"Usage", "need 1 <= --n-min <= --n-max", 2};
  if (a.audit.samples < 1) throw CliError{"Usage", "--samples must be positive", 2};
  a.audit.seed = a.shared.seed;
  a.audit.threads = a.shared.threads;
  a.audit.include_example_six = !a.no_example_six;
  a.audit.permanence = a.perm;
  AuditReport report = implication_audit(a.audit);
  if (!report.violations.empty()) write_audit_dumps(report, a.dump_dir);
  if (a.shared.format == "json") {
    emit(a.shared, out, dump(to_json(report, a.include_samples)));
    return;
  }
  std::ostringstream os;
  os << "instances " << report.samples.size() << ", violations " << report.violations.size() << '\n';
  for (std::size_t c = 0; c < kAuditChecks.size(); ++c) {
    const CheckTally& t = report.tallies[c];
    os << kAuditChecks[c] << " pass " << t.pass << " fail " << t.fail << " inconclusive " << t.inconclusive
       << " n/a " << t.not_applicable << "  " << audit_check_description(kAuditChecks[c]) << '\n';
  }
  os << "soft check: detected " << report.soft_detected << " undetected " << report.soft_undetected
     << " contradicted " << report.soft_contradicted << '\n';
  for (const AuditViolation& v : report.violations)
    os << "violation " << v.check << " sample " << v.sample << ": " << v.evidence
       << (v.dump_file.empty() ? "" : " [" + v.dump_file + "]") << '\n';
  emit(a.shared, out, os.str());
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyperchain analysis: graph structure, equilibria, stability, dynamics and permanence"};
  app.name(args.empty() ? "hyperchain" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  AnalyzeArgs an;
  CLI::App* analyze = app.add_subcommand("analyze", "Graph profile, equilibria and stability of a network file");
  analyze->add_option("file", an.file, "HYPERCHAIN v1 or JSON network ('-' for stdin)")->required();
  analyze->add_flag("--permanence", an.permanence, "Also run the numeric permanence test");
  add_permanence_flags(analyze, an.perm);
  add_shared(analyze, an.shared, 0, "json");

  SimulateArgs si;
  CLI::App* simulate = app.add_subcommand("simulate", "Integrate the absolute or relative system");
  simulate->add_option("file", si.file, "Network file ('-' for stdin)")->required();
  simulate->add_option("--mode", si.mode, "abs or rel")->check(CLI::IsMember({"abs", "rel"}))->capture_default_str();
  simulate->add_option("--x0", si.x0, "Comma-separated initial state (default: barycentre / all ones)");
  simulate->add_option("--t-end", si.t_end, "Horizon")->capture_default_str();
  simulate->add_flag("--normalize", si.normalize, "Rescale x0 onto the simplex (rel mode)");
  simulate->add_option("--blow-up-threshold", si.blow_up_threshold, "Absolute mode norm threshold (default: off)");
  simulate->add_option("--rtol", si.rtol)->capture_default_str();
  simulate->add_option("--atol", si.atol)->capture_default_str();
  simulate->add_option("--stepper", si.stepper)->check(CLI::IsMember({"dopri5", "rk4"}))->capture_default_str();
  simulate->add_option("--fixed-step", si.fixed_step, "Step size for rk4")->capture_default_str();
  simulate->add_option("--sidecar", si.sidecar, "JSON sidecar path (default: --out with .json extension)");
  add_shared(simulate, si.shared, 0, "json");

  PermanenceArgs pe;
  CLI::App* permanence = app.add_subcommand("permanence", "Numeric permanence test");
  permanence->add_option("file", pe.file, "Network file ('-' for stdin)")->required();
  permanence->add_flag("--summary", pe.summary, "Omit per-trial results");
  add_permanence_flags(permanence, pe.perm);
  add_shared(permanence, pe.shared, 0, "json");

  GenArgs ge;
  CLI::App* gen = app.add_subcommand("gen", "Generate a network file");
  gen->add_option("--type", ge.type)
      ->required()
      ->check(CLI::IsMember({"cycle", "hamiltonian-plus-chords", "random", "example-five", "example-six"}));
  gen->add_option("--n", ge.n, "Species count");
  gen->add_option("--chords", ge.chords, "Chord count for hamiltonian-plus-chords (default: random 1..n)");
  gen->add_option("--edge-probability", ge.edge_probability, "Edge probability for random")->capture_default_str();
  gen->add_option("--loop-probability", ge.loop_probability, "Self-loop probability")->capture_default_str();
  gen->add_option("--rates", ge.rates, "Rate assignment (default: unit for cycle, random otherwise)")
      ->check(CLI::IsMember({"unit", "random", "existence", "uniqueness", "certificate", "nonpermanence"}));
  gen->add_option("--epsilon", ge.epsilon, "Small rate for uniqueness / nonpermanence")->capture_default_str();
  gen->add_option("--rate-min", ge.rate_min)->capture_default_str();
  gen->add_option("--rate-max", ge.rate_max)->capture_default_str();
  gen->add_option("--k3", ge.k3, "example-five rate k3")->capture_default_str();
  gen->add_option("--k5", ge.k5, "example-five rate k5")->capture_default_str();
  add_shared(gen, ge.shared, 0, "text");

  AuditArgs au;
  CLI::App* audit = app.add_subcommand("audit", "Randomized audit of the graph/dynamics implications");
  audit->add_option("--n-min", au.audit.n_min)->capture_default_str();
  audit->add_option("--n-max", au.audit.n_max)->capture_default_str();
  audit->add_option("--samples", au.audit.samples)->capture_default_str();
  audit->add_option("--rate-draws", au.audit.rate_draws)->capture_default_str();
  audit->add_option("--integer-draws", au.audit.integer_draws)->capture_default_str();
  audit->add_flag("--no-example-six", au.no_example_six, "Do not append the six-species example");
  audit->add_option("--inject-violation", au.inject, "Debug: report the first passing instance of this check as failed");
  audit->add_option("--dump-dir", au.dump_dir, "Where counterexample files go")->capture_default_str();
  audit->add_flag("--include-samples", au.include_samples, "Per-sample outcomes in the report");
  audit->add_option("--replay", au.replay, "Re-run every check on one dumped network");
  audit->add_option("--sample-seed", au.sample_seed, "Sample seed for --replay");
  add_permanence_flags(audit, au.perm);
  add_shared(audit, au.shared, 1, "json");

  // CLI11 consumes a reversed argument list without the program name.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      if (dynamic_cast<const CLI::CallForVersion*>(&e))
        out << version() << '\n';
      else
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
      return 0;
    }
    err << "error: Usage: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*analyze) cmd_analyze(an, out);
    if (*simulate) cmd_simulate(si, out);
    if (*permanence) cmd_permanence(pe, out);
    if (*gen) cmd_gen(ge, out);
    if (*audit) cmd_audit(au, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const CliError& e) {
    err << "error: " << e.code << ": " << e.message << '\n';
    return e.exit_code;
  } catch (const json::exception& e) {
    err << "error: ParseError: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: Internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace hyperchain::cli
