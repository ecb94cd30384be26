// Command-line front end: calculators, hypergraph generation, single runs,
// exact search, sweeps and the cross-check suites.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jtight/combinatorics.hpp"
#include "jtight/experiments.hpp"
#include "jtight/hypergraph.hpp"
#include "jtight/oracle.hpp"
#include "jtight/run.hpp"
#include "jtight/verify.hpp"

namespace {

using namespace jtight;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCensored = 2;

// Output goes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

// Reads "key = value" lines ('#' starts a comment) and turns them into flag
// tokens inserted right after the subcommand name, so that flags given on
// the command line come later and win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty() || args.size() < 2) return args;
  std::ifstream in(config_path);
  if (!in) throw CLI::ValidationError("--config", "cannot read " + config_path);
  std::vector<std::string> injected;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (eq == std::string::npos) {
      if (!trim(line).empty()) throw CLI::ValidationError("--config", "expected key = value: " + line);
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    injected.push_back(key.size() == 1 ? "-" + key : "--" + key);
    injected.push_back(value);
  }
  out.push_back(args[0]);
  out.push_back(args[1]);
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

struct Common {
  std::uint64_t seed = 1;
  std::string config;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_option("--config", c.config, "File of key = value lines (keys are flag names)");
  cmd->add_option("--out", c.out, "Output path (default stdout)");
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

int cmd_params(int k, int j) {
  const StructuralParams sp = structural_params(k, j);
  std::cout << "a=" << sp.a << " b=" << sp.b << " s=" << sp.s << " r=" << sp.r << " batch=" << sp.batch_size << '\n';
  return kExitOk;
}

int cmd_bounds(double n, int k, int j, double eps, double omega, double delta, Output& out) {
  for (const BoundCurve& c : theorem_bounds(n, k, j, eps, omega, delta)) {
    out.stream() << regime_name(c.regime) << ' ' << format_double(c.value) << '\n';
  }
  return kExitOk;
}

void write_summary(std::ostream& os, const RunSummary& s) {
  os << "max_length " << s.max_length << '\n'
     << "final_length " << s.final_length << '\n'
     << "queries " << s.t << '\n'
     << "new_starts " << s.new_starts << '\n'
     << "edges_found " << s.edges_found << '\n'
     << "explored " << s.explored << '\n'
     << "stop_reason " << stop_reason_name(s.stop_reason) << '\n';
  static const char* names[] = {"S1", "S2", "S3", "S4"};
  for (std::size_t i = 0; i < 4; ++i) {
    os << "first_" << names[i] << ' ';
    if (s.first_trigger[i]) os << *s.first_trigger[i]; else os << '-';
    os << '\n';
  }
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int report(const SuiteResult& r, const std::string& what) {
  std::cout << r.passed << '/' << r.total << ' ' << what << '\n';
  for (const std::string& f : r.failures) std::cout << "  " << f << '\n';
  return r.ok() ? kExitOk : kExitCensored;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"j-tight path search in random hypergraphs"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  int result = kExitOk;

  // params
  int pk = 0, pj = 0;
  auto* params = app.add_subcommand("params", "Structural parameters a, b, s, r and batch size");
  params->add_option("-k", pk, "Uniformity")->required();
  params->add_option("-j", pj, "Tightness")->required();
  Common params_common;
  add_common(params, params_common);
  params->callback([&] { result = cmd_params(pk, pj); });

  // bounds
  double bn = 0, beps = 0, bomega = 1, bdelta = 0.5;
  int bk = 0, bj = 0;
  auto* bounds = app.add_subcommand("bounds", "Length bounds for the sub- and supercritical regimes");
  bounds->add_option("-n", bn, "Vertex count (real)")->required();
  bounds->add_option("-k", bk)->required();
  bounds->add_option("-j", bj)->required();
  bounds->add_option("--eps", beps, "Distance from the threshold, in (0,1)")->required();
  bounds->add_option("--omega", bomega, "Slack of the subcritical curves")->capture_default_str();
  bounds->add_option("--delta", bdelta, "Slack of the supercritical curves")->capture_default_str();
  Common bounds_common;
  add_common(bounds, bounds_common);
  bounds->callback([&] {
    Output out(bounds_common.out);
    result = cmd_bounds(bn, bk, bj, beps, bomega, bdelta, out);
  });

  // z
  int zk = 0, zj = 0;
  std::size_t zl = 0;
  bool zbrute = false;
  auto* z = app.add_subcommand("z", "Size of an edge-set class of j-tight paths");
  z->add_option("-k", zk)->required();
  z->add_option("-j", zj)->required();
  z->add_option("-l", zl, "Path length")->required();
  z->add_flag("--brute", zbrute, "Always enumerate orderings");
  Common z_common;
  add_common(z, z_common);
  z->callback([&] {
    std::cout << (zbrute ? z_ell_bruteforce(zk, zj, zl) : z_ell(zk, zj, zl)) << '\n';
  });

  // expectation
  std::uint64_t en = 0;
  int ek = 0, ej = 0;
  std::size_t el = 0, esamples = 0;
  double ep = 0;
  auto* expectation = app.add_subcommand("expectation", "Expected number of path classes (n)_v p^l / z_l");
  expectation->add_option("-n", en)->required();
  expectation->add_option("-k", ek)->required();
  expectation->add_option("-j", ej)->required();
  expectation->add_option("-l", el)->required();
  expectation->add_option("-p", ep, "Edge probability")->required();
  expectation->add_option("--samples", esamples, "Also estimate by sampling (n <= 12)");
  Common expectation_common;
  add_common(expectation, expectation_common);
  expectation->callback([&] {
    std::cout << format_double(expected_path_classes(en, ek, ej, el, ep)) << '\n';
    if (esamples > 0) {
      const MonteCarloEstimate mc = expectation_monte_carlo(static_cast<std::uint32_t>(en), ek, ej, el, ep, esamples,
                                                            expectation_common.seed);
      std::cout << "monte_carlo " << format_double(mc.mean) << " se " << format_double(mc.standard_error) << '\n';
    }
  });

  // gen
  std::uint32_t gn = 0;
  int gk = 0;
  double gp = 0;
  bool gsparse = false;
  auto* gen = app.add_subcommand("gen", "Write a sample of H^k(n,p) as a hypergraph file");
  gen->add_option("-n", gn)->required();
  gen->add_option("-k", gk)->required();
  gen->add_option("-p", gp)->required();
  gen->add_flag("--sparse", gsparse, "Geometric skipping (large n); not coin-compatible with the lazy backend");
  Common gen_common;
  add_common(gen, gen_common);
  gen->callback([&] {
    const ExplicitHypergraph h =
        gsparse ? generate_sparse(gn, gk, gp, gen_common.seed) : generate_explicit(gn, gk, gp, gen_common.seed);
    Output out(gen_common.out);
    write_hypergraph(out.stream(), h);
  });

  // run
  std::uint32_t rn = 0;
  int rk = 3, rj = 2;
  double rp = -1, reps = 0, rdelta = 0.5, rtarget = -1, rt0 = -1, rbeta = 0.1;
  std::uint64_t rbudget = 0;
  std::optional<std::uint64_t> rcoin;
  std::string rinput, rtrace, rlevel = "full", renabled = "S1,S2";
  bool rexplicit = false, rtrack = false;
  auto* runc = app.add_subcommand("run", "One PathFinder run");
  runc->add_option("--input", rinput, "Explicit hypergraph file (otherwise the lazy H^k(n,p))");
  runc->add_option("-n", rn);
  runc->add_option("-k", rk)->capture_default_str();
  runc->add_option("-j", rj)->capture_default_str();
  runc->add_option("-p", rp, "Edge probability (default (1+eps) p0)");
  runc->add_option("--eps", reps, "p = (1+eps) p0; positive eps also sets the S1 target and T0");
  runc->add_option("--delta", rdelta)->capture_default_str();
  runc->add_option("--coin_seed", rcoin, "Seed of the edge coin (default: --seed)");
  runc->add_flag("--explicit", rexplicit, "Generate the hypergraph explicitly instead of lazily");
  runc->add_option("--target", rtarget, "S1 target length");
  runc->add_option("--t0", rt0, "S2 query cap");
  runc->add_option("--beta", rbeta)->capture_default_str();
  runc->add_option("--enabled", renabled, "Stopping conditions that end the run")->capture_default_str();
  runc->add_flag("--track", rtrack, "Maintain degree trackers and record S3/S4 trigger times");
  runc->add_option("--budget", rbudget, "Hard cap on queries");
  runc->add_option("--trace", rtrace, "Write the trace as JSON lines");
  runc->add_option("--trace_level", rlevel, "summary, structural or full")->capture_default_str();
  Common run_common;
  add_common(runc, run_common);
  runc->callback([&] {
    std::unique_ptr<EdgeSource> h;
    if (!rinput.empty()) {
      std::ifstream in(rinput);
      if (!in) throw std::runtime_error("cannot read " + rinput);
      h = std::make_unique<ExplicitHypergraph>(read_hypergraph(in));
      rn = h->n();
      rk = h->k();
    } else {
      if (rn == 0) throw CLI::ValidationError("run", "give -n or --input");
      if (rp < 0) rp = sweep_probability(rn, rk, rj, reps);
      const std::uint64_t coin = rcoin.value_or(run_common.seed);
      if (rexplicit) {
        h = std::make_unique<ExplicitHypergraph>(generate_explicit(rn, rk, rp, coin));
      } else {
        h = std::make_unique<LazyHypergraph>(rn, rk, rp, coin);
      }
    }
    StoppingConfig stop = reps > 0 ? StoppingConfig::supercritical(rn, rk, rj, reps, rdelta) : StoppingConfig{};
    if (rtarget >= 0) stop.target_length = rtarget;
    if (rt0 > 0) stop.t0 = rt0;
    if (rbudget > 0) stop.budget = rbudget;
    stop.beta = rbeta;
    stop.track_degrees = rtrack;
    stop.enabled = {false, false, false, false};
    for (const std::string& name : split_commas(renabled)) {
      const auto r = parse_stop_reason(name);
      if (!r) throw CLI::ValidationError("--enabled", "unknown condition " + name);
      stop.enable(*r);
    }
    const auto level = parse_trace_level(rlevel);
    if (!level) throw CLI::ValidationError("--trace_level", "unknown level " + rlevel);
    const RunTrace trace = run(*h, rj, run_common.seed, stop, rtrace.empty() ? TraceLevel::Summary : *level);
    if (!rtrace.empty()) {
      std::ofstream tf(rtrace);
      if (!tf) throw std::runtime_error("cannot open " + rtrace);
      write_trace_jsonl(tf, trace);
    }
    Output out(run_common.out);
    write_summary(out.stream(), trace.summary);
    if (trace.summary.stop_reason == StopReason::Budget) result = kExitCensored;
  });

  // oracle
  std::string oinput;
  int oj = 1;
  std::uint64_t obudget = kDefaultOracleBudget;
  auto* oracle = app.add_subcommand("oracle", "Exact longest j-tight path of a hypergraph file");
  oracle->add_option("--input", oinput)->required();
  oracle->add_option("-j", oj)->required();
  oracle->add_option("--budget", obudget, "Search node budget")->capture_default_str();
  Common oracle_common;
  add_common(oracle, oracle_common);
  oracle->callback([&] {
    std::ifstream in(oinput);
    if (!in) throw std::runtime_error("cannot read " + oinput);
    const ExplicitHypergraph h = read_hypergraph(in);
    const LongestPathResult r = longest_path_exact(h, oj, obudget);
    Output out(oracle_common.out);
    out.stream() << "length " << r.length << '\n' << "witness";
    for (Vertex v : r.witness) out.stream() << ' ' << v;
    out.stream() << '\n' << "nodes " << r.nodes << '\n' << "censored " << (r.censored ? 1 : 0) << '\n';
    if (r.censored) result = kExitCensored;
  });

  // sweep
  std::string preset, summary_path;
  std::map<std::string, std::string> settings;
  auto* sweep = app.add_subcommand("sweep", "Run a sweep of trials and write CSV records");
  sweep->add_option("--preset", preset, "ac7, ac8, ac9 or smoke");
  sweep->add_option("--summary", summary_path, "Write the per-point summary CSV here");
  const std::vector<std::pair<std::string, std::string>> sweep_keys = {
      {"k", "-k"}, {"j", "-j"}, {"n", "-n"}, {"eps", "--eps"}, {"trials", "--trials"}, {"mode", "--mode"},
      {"delta", "--delta"}, {"omega", "--omega"}, {"query_budget", "--query_budget"},
      {"oracle_budget", "--oracle_budget"}, {"enumeration_budget", "--enumeration_budget"}, {"beta", "--beta"},
      {"enabled", "--enabled"}, {"timing", "--timing"}, {"jobs", "--jobs"}};
  for (const auto& [key, flag] : sweep_keys) sweep->add_option(flag, settings[key], "SweepSpec " + key);
  Common sweep_common;
  add_common(sweep, sweep_common);
  sweep->callback([&] {
    SweepSpec spec;
    if (!preset.empty()) {
      const auto it = presets().find(preset);
      if (it == presets().end()) throw CLI::ValidationError("--preset", "unknown preset " + preset);
      spec = it->second;
    }
    if (sweep->count("--seed") > 0) spec.seed = sweep_common.seed;
    for (const auto& [key, flag] : sweep_keys) {
      if (sweep->count(flag) > 0) apply_setting(spec, key, settings[key]);
    }
    spec.validate();
    Output out(sweep_common.out);
    write_record_csv_header(out.stream());
    std::vector<TrialRecord> records;
    run_sweep(spec, [&](const TrialRecord& r) {
      write_record_csv_row(out.stream(), r);
      out.stream().flush();
      if (!r.error.empty()) std::cerr << "trial " << r.trial << ": " << r.error << '\n';
      records.push_back(r);
    });
    if (!summary_path.empty()) {
      std::ofstream sf(summary_path);
      if (!sf) throw std::runtime_error("cannot open " + summary_path);
      write_summary_csv(sf, aggregate(records, theorem_bound_lookup(spec.k, spec.j, spec.delta, spec.omega)));
    }
    for (const TrialRecord& r : records) {
      if (r.censored) result = kExitCensored;
    }
  });

  // verify
  std::string suite = "all";
  std::uint32_t vn = 20;
  int vk = 3, vj = 2;
  std::size_t vtrials = 100;
  double vp = -1;
  auto* verify = app.add_subcommand("verify", "Cross-check suites: z, lazy-explicit, oracle-bound, all");
  verify->add_option("--suite", suite)->capture_default_str();
  verify->add_option("-n", vn)->capture_default_str();
  verify->add_option("-k", vk)->capture_default_str();
  verify->add_option("-j", vj)->capture_default_str();
  verify->add_option("-p", vp, "Edge probability (default 2 p0)");
  verify->add_option("--trials", vtrials)->capture_default_str();
  Common verify_common;
  add_common(verify, verify_common);
  verify->callback([&] {
    const bool all = suite == "all";
    if (!all && suite != "z" && suite != "lazy-explicit" && suite != "oracle-bound") {
      throw CLI::ValidationError("--suite", "unknown suite " + suite);
    }
    const double p = vp >= 0 ? vp : std::min(1.0, 2.0 * threshold_p0(vn, vk, vj));
    int code = kExitOk;
    if (all || suite == "z") code = std::max(code, report(verify_z_formula(), "closed forms match brute force"));
    if (all || suite == "lazy-explicit") {
      code = std::max(code, report(verify_lazy_explicit(vn, vk, vj, p, vtrials, verify_common.seed),
                                   "traces identical"));
    }
    if (all || suite == "oracle-bound") {
      const std::uint32_t n = std::min<std::uint32_t>(vn, 12);
      const double po = vp >= 0 ? vp : std::min(1.0, 2.0 * threshold_p0(n, vk, vj));
      const SuiteResult r = verify_oracle_bound(n, vk, vj, po, vtrials, verify_common.seed);
      code = std::max(code, report(r, "runs with max_l <= exact optimum"));
      std::cout << "equal to the optimum in " << r.equalities << '/' << r.total << '\n';
    }
    result = code;
  });

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(args);
    std::vector<const char*> raw;
    for (const std::string& a : args) raw.push_back(a.c_str());
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const GenerationBudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCensored;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return result;
}

}  // namespace

int main(int argc, char** argv) { return run_cli(argc, argv); }
