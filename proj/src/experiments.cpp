#include "jtight/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "jtight/combinatorics.hpp"
#include "jtight/hypergraph.hpp"
#include "jtight/oracle.hpp"
#include "jtight/run.hpp"

namespace jtight {

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::PathfinderLazy: return "pathfinder_lazy";
    case Mode::PathfinderExplicit: return "pathfinder_explicit";
    case Mode::OracleExact: return "oracle_exact";
    case Mode::OracleEnumerateSubcritical: return "oracle_enumerate_subcritical";
  }
  return "pathfinder_lazy";
}

std::optional<Mode> parse_mode(std::string_view name) {
  for (Mode m : {Mode::PathfinderLazy, Mode::PathfinderExplicit, Mode::OracleExact,
                 Mode::OracleEnumerateSubcritical}) {
    if (mode_name(m) == name) return m;
  }
  return std::nullopt;
}

void SweepSpec::validate() const {
  structural_params(k, j);
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  for (double e : eps) {
    if (e == 0.0 || !std::isfinite(e) || e <= -1.0) throw std::invalid_argument("eps entries must be nonzero and > -1");
  }
  for (std::uint32_t v : n) {
    if (v <= static_cast<std::uint32_t>(k)) throw std::invalid_argument("every n must exceed k");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  if (trials >= (std::size_t{1} << 20) || eps.size() >= (std::size_t{1} << 20)) {
    throw std::invalid_argument("too many trials or eps values for seed packing");
  }
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t n_index, std::size_t eps_index, std::size_t trial) {
  const std::uint64_t packed = (static_cast<std::uint64_t>(n_index) << 40) |
                               (static_cast<std::uint64_t>(eps_index) << 20) | static_cast<std::uint64_t>(trial);
  return derive_seed(master, packed);
}

std::uint64_t coin_seed(std::uint64_t trial_seed) { return derive_seed(trial_seed, 1); }
std::uint64_t search_seed(std::uint64_t trial_seed) { return derive_seed(trial_seed, 2); }

double sweep_probability(std::uint32_t n, int k, int j, double eps) {
  return std::min(1.0, (1.0 + eps) * threshold_p0(n, k, j));
}

TrialRecord run_trial(const SweepSpec& spec, std::size_t n_index, std::size_t eps_index, std::size_t trial) {
  TrialRecord rec;
  rec.n = spec.n.at(n_index);
  rec.k = spec.k;
  rec.j = spec.j;
  rec.eps = spec.eps.at(eps_index);
  rec.seed = trial_seed(spec.seed, n_index, eps_index, trial);
  rec.trial = trial;
  rec.mode = spec.mode;
  const auto start = std::chrono::steady_clock::now();
  try {
    rec.p = sweep_probability(rec.n, rec.k, rec.j, rec.eps);
    if (spec.mode == Mode::PathfinderLazy || spec.mode == Mode::PathfinderExplicit) {
      StoppingConfig stop =
          rec.eps > 0 ? StoppingConfig::supercritical(rec.n, rec.k, rec.j, rec.eps, spec.delta) : StoppingConfig{};
      stop.beta = spec.beta;
      stop.enabled = spec.enabled;
      stop.budget = spec.query_budget;
      RunTrace trace;
      if (spec.mode == Mode::PathfinderLazy) {
        LazyHypergraph h(rec.n, rec.k, rec.p, coin_seed(rec.seed));
        trace = run(h, rec.j, search_seed(rec.seed), stop);
      } else {
        ExplicitHypergraph h = generate_explicit(rec.n, rec.k, rec.p, coin_seed(rec.seed), spec.enumeration_budget);
        trace = run(h, rec.j, search_seed(rec.seed), stop);
      }
      rec.length = trace.summary.max_length;
      rec.queries = trace.summary.t;
      rec.new_starts = trace.summary.new_starts;
      rec.edges = trace.summary.edges_found;
      rec.stop_reason = trace.summary.stop_reason;
      rec.censored = rec.stop_reason == StopReason::Budget;
    } else {
      const ExplicitHypergraph h =
          spec.mode == Mode::OracleExact
              ? generate_explicit(rec.n, rec.k, rec.p, coin_seed(rec.seed), spec.enumeration_budget)
              : generate_sparse(rec.n, rec.k, rec.p, coin_seed(rec.seed));
      const LongestPathResult res = longest_path_exact(h, rec.j, spec.oracle_budget);
      rec.length = res.length;
      rec.censored = res.censored;
      rec.queries = res.nodes;
      rec.edges = h.edge_count();
    }
  } catch (const std::exception& e) {
    rec.censored = true;
    rec.error = e.what();
  }
  if (spec.timing) {
    rec.ms = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count());
  }
  return rec;
}

void run_sweep(const SweepSpec& spec, const std::function<void(const TrialRecord&)>& sink) {
  spec.validate();
  struct Task {
    std::size_t ni, ei, trial;
  };
  std::vector<Task> tasks;
  for (std::size_t ni = 0; ni < spec.n.size(); ++ni) {
    for (std::size_t ei = 0; ei < spec.eps.size(); ++ei) {
      for (std::size_t t = 0; t < spec.trials; ++t) tasks.push_back({ni, ei, t});
    }
  }
  if (spec.jobs <= 1 || tasks.size() <= 1) {
    for (const Task& t : tasks) sink(run_trial(spec, t.ni, t.ei, t.trial));
    return;
  }

  std::vector<std::optional<TrialRecord>> done(tasks.size());
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      TrialRecord rec = run_trial(spec, tasks[i].ni, tasks[i].ei, tasks[i].trial);
      {
        std::lock_guard<std::mutex> lock(mu);
        done[i] = std::move(rec);
      }
      cv.notify_one();
    }
  };
  std::vector<std::thread> pool;
  const std::size_t workers = std::min(spec.jobs, tasks.size());
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return done[i].has_value(); });
    TrialRecord rec = std::move(*done[i]);
    done[i].reset();
    lock.unlock();
    sink(rec);
  }
  for (std::thread& t : pool) t.join();
}

std::vector<TrialRecord> run_sweep(const SweepSpec& spec) {
  std::vector<TrialRecord> out;
  run_sweep(spec, [&](const TrialRecord& r) { out.push_back(r); });
  return out;
}

BoundLookup theorem_bound_lookup(int k, int j, double delta, double omega) {
  return [=](std::uint32_t n, double eps) -> std::optional<std::pair<double, double>> {
    const double e = std::abs(eps);
    if (!(e > 0.0 && e < 1.0)) return std::nullopt;
    const std::vector<BoundCurve> curves = theorem_bounds(n, k, j, e, omega, delta);
    if (eps < 0) return std::make_pair(bound_value(curves, Regime::SubcriticalLower),
                                       bound_value(curves, Regime::SubcriticalUpper));
    const Regime lower = j == 1 ? Regime::LooseLower : Regime::SupercriticalLower;
    return std::make_pair(bound_value(curves, lower), bound_value(curves, Regime::SupercriticalUpper));
  };
}

std::vector<SummaryRow> aggregate(const std::vector<TrialRecord>& records, const BoundLookup& bounds) {
  std::vector<std::pair<std::uint32_t, double>> keys;
  std::vector<std::vector<const TrialRecord*>> groups;
  for (const TrialRecord& r : records) {
    std::size_t g = 0;
    while (g < keys.size() && !(keys[g].first == r.n && keys[g].second == r.eps)) ++g;
    if (g == keys.size()) {
      keys.emplace_back(r.n, r.eps);
      groups.emplace_back();
    }
    groups[g].push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (std::size_t g = 0; g < keys.size(); ++g) {
    SummaryRow row;
    row.n = keys[g].first;
    row.eps = keys[g].second;
    row.trials = groups[g].size();
    if (bounds) {
      if (const auto b = bounds(row.n, row.eps)) {
        row.lower = b->first;
        row.upper = b->second;
      }
    }
    std::size_t uncensored = 0, within = 0, s1 = 0;
    double sum = 0.0;
    for (const TrialRecord* r : groups[g]) {
      if (r->stop_reason == StopReason::S1) ++s1;
      if (r->censored) {
        ++row.censored;
        continue;
      }
      const std::size_t len = r->length;
      row.min_length = uncensored == 0 ? len : std::min(row.min_length, len);
      row.max_length = std::max(row.max_length, len);
      sum += static_cast<double>(len);
      ++uncensored;
      if (row.lower && row.upper && static_cast<double>(len) >= *row.lower &&
          static_cast<double>(len) <= *row.upper) {
        ++within;
      }
    }
    if (uncensored > 0) {
      row.mean_length = sum / static_cast<double>(uncensored);
      row.fraction_within = static_cast<double>(within) / static_cast<double>(uncensored);
    }
    row.censoring_rate = static_cast<double>(row.censored) / static_cast<double>(row.trials);
    row.s1_rate = static_cast<double>(s1) / static_cast<double>(row.trials);
    out.push_back(row);
  }
  return out;
}

namespace {

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

}  // namespace

void write_record_csv_header(std::ostream& os) {
  os << "n,k,j,eps,p,seed,trial,mode,L,censored,queries,new_starts,edges,stop_reason,ms\n";
}

void write_record_csv_row(std::ostream& os, const TrialRecord& r) {
  os << r.n << ',' << r.k << ',' << r.j << ',' << fmt("%.6g", r.eps) << ',' << fmt("%.10g", r.p) << ',' << r.seed
     << ',' << r.trial << ',' << mode_name(r.mode) << ',' << r.length << ',' << (r.censored ? 1 : 0) << ','
     << r.queries << ',' << r.new_starts << ',' << r.edges << ',' << stop_reason_name(r.stop_reason) << ',' << r.ms
     << '\n';
}

void write_records_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  write_record_csv_header(os);
  for (const TrialRecord& r : records) write_record_csv_row(os, r);
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "n,eps,trials,censored,mean_L,min_L,max_L,lower,upper,fraction_within,censoring_rate,s1_rate\n";
  for (const SummaryRow& r : rows) {
    os << r.n << ',' << fmt("%.6g", r.eps) << ',' << r.trials << ',' << r.censored << ','
       << fmt("%.6g", r.mean_length) << ',' << r.min_length << ',' << r.max_length << ','
       << (r.lower ? fmt("%.6g", *r.lower) : "") << ',' << (r.upper ? fmt("%.6g", *r.upper) : "") << ','
       << fmt("%.6g", r.fraction_within) << ',' << fmt("%.6g", r.censoring_rate) << ',' << fmt("%.6g", r.s1_rate)
       << '\n';
  }
}

const std::map<std::string, SweepSpec>& presets() {
  static const std::map<std::string, SweepSpec> table = [] {
    std::map<std::string, SweepSpec> m;
    SweepSpec ac7;
    ac7.k = 3;
    ac7.j = 2;
    ac7.n = {10000};
    ac7.eps = {0.2};
    ac7.trials = 10;
    ac7.mode = Mode::PathfinderLazy;
    ac7.delta = 0.5;
    ac7.query_budget = 1'000'000'000;
    m["ac7"] = ac7;

    SweepSpec ac8 = ac7;
    ac8.j = 1;
    ac8.n = {2000};
    ac8.eps = {0.4};
    m["ac8"] = ac8;

    SweepSpec ac9;
    ac9.k = 3;
    ac9.j = 2;
    ac9.n = {2000};
    ac9.eps = {-0.3};
    ac9.omega = 6.0;
    ac9.trials = 20;
    ac9.mode = Mode::OracleEnumerateSubcritical;
    ac9.oracle_budget = 100'000'000;
    m["ac9"] = ac9;

    SweepSpec smoke;
    smoke.k = 3;
    smoke.j = 2;
    smoke.n = {20, 30};
    smoke.eps = {0.5, -0.5};
    smoke.trials = 3;
    smoke.mode = Mode::PathfinderExplicit;
    m["smoke"] = smoke;
    return m;
  }();
  return table;
}

namespace {

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(value);
  while (std::getline(is, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw std::invalid_argument(key + ": not a number: '" + value + "'");
  return x;
}

// Accepts 1000000 as well as 1e6.
std::uint64_t parse_count(const std::string& key, const std::string& value) {
  const double x = parse_double(key, value);
  if (!(x >= 0.0) || x != std::floor(x) || x >= 0x1.0p63) {
    throw std::invalid_argument(key + ": not a nonnegative integer: '" + value + "'");
  }
  if (x < 0x1.0p53) return static_cast<std::uint64_t>(x);
  return std::stoull(value);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw std::invalid_argument(key + ": not a boolean: '" + value + "'");
}

}  // namespace

void apply_setting(SweepSpec& spec, const std::string& key, const std::string& value) {
  if (key == "k") {
    spec.k = static_cast<int>(parse_count(key, value));
  } else if (key == "j") {
    spec.j = static_cast<int>(parse_count(key, value));
  } else if (key == "n") {
    spec.n.clear();
    for (const std::string& v : split_list(value)) {
      const std::uint64_t x = parse_count(key, v);
      if (x > UINT32_MAX) throw std::invalid_argument("n too large");
      spec.n.push_back(static_cast<std::uint32_t>(x));
    }
  } else if (key == "eps") {
    spec.eps.clear();
    for (const std::string& v : split_list(value)) spec.eps.push_back(parse_double(key, v));
  } else if (key == "trials") {
    spec.trials = parse_count(key, value);
  } else if (key == "mode") {
    const auto m = parse_mode(value);
    if (!m) throw std::invalid_argument("unknown mode '" + value + "'");
    spec.mode = *m;
  } else if (key == "delta") {
    spec.delta = parse_double(key, value);
  } else if (key == "omega") {
    spec.omega = parse_double(key, value);
  } else if (key == "seed") {
    spec.seed = parse_count(key, value);
  } else if (key == "query_budget" || key == "budget") {
    spec.query_budget = parse_count(key, value);
  } else if (key == "oracle_budget") {
    spec.oracle_budget = parse_count(key, value);
  } else if (key == "enumeration_budget") {
    spec.enumeration_budget = parse_count(key, value);
  } else if (key == "beta") {
    spec.beta = parse_double(key, value);
  } else if (key == "enabled") {
    spec.enabled = {false, false, false, false};
    for (const std::string& v : split_list(value)) {
      const auto r = parse_stop_reason(v);
      if (!r || *r == StopReason::Exhausted || *r == StopReason::Budget || *r == StopReason::NotApplicable) {
        throw std::invalid_argument("enabled: unknown stopping condition '" + v + "'");
      }
      spec.enabled[static_cast<std::size_t>(*r)] = true;
    }
  } else if (key == "timing") {
    spec.timing = parse_bool(key, value);
  } else if (key == "jobs") {
    spec.jobs = parse_count(key, value);
  } else {
    throw std::invalid_argument("unknown sweep setting '" + key + "'");
  }
}

}  // namespace jtight
