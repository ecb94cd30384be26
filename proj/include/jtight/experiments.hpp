#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jtight/monitor.hpp"
#include "jtight/pathfinder.hpp"

namespace jtight {

enum class Mode { PathfinderLazy, PathfinderExplicit, OracleExact, OracleEnumerateSubcritical };

std::string_view mode_name(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

struct SweepSpec {
  int k = 3;
  int j = 2;
  std::vector<std::uint32_t> n;
  std::vector<double> eps;  // p = (1+eps) p0; negative entries are subcritical
  std::size_t trials = 1;
  Mode mode = Mode::PathfinderLazy;
  double delta = 0.5;
  double omega = 6.0;
  std::uint64_t seed = 1;
  std::uint64_t query_budget = 1'000'000'000;
  std::uint64_t oracle_budget = 100'000'000;
  std::uint64_t enumeration_budget = 100'000'000;
  double beta = 0.1;
  std::array<bool, 4> enabled{true, true, false, false};  // S1..S4 for pathfinder modes
  bool timing = true;  // fill the ms column; off gives byte-reproducible CSV
  std::size_t jobs = 1;

  void validate() const;
};

struct TrialRecord {
  std::uint32_t n = 0;
  int k = 0;
  int j = 0;
  double eps = 0.0;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  Mode mode = Mode::PathfinderLazy;
  std::size_t length = 0;  // L
  bool censored = false;
  std::uint64_t queries = 0;     // pathfinder queries, or oracle search nodes
  std::uint64_t new_starts = 0;
  std::uint64_t edges = 0;       // positive queries, or |E(H)| for oracle modes
  StopReason stop_reason = StopReason::NotApplicable;
  std::uint64_t ms = 0;
  std::string error;  // why a trial was censored by a failure

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Seed of trial (n_index, eps_index, trial): the indices are packed into one
/// word (20 bits each for trial and eps_index) and mixed with the master seed
/// by derive_seed, which is injective in the packed word.
std::uint64_t trial_seed(std::uint64_t master, std::size_t n_index, std::size_t eps_index, std::size_t trial);

/// The hypergraph coin and the search orders of a trial use separate streams.
std::uint64_t coin_seed(std::uint64_t trial_seed);
std::uint64_t search_seed(std::uint64_t trial_seed);

/// p = (1 + eps) p0(n, k, j).
double sweep_probability(std::uint32_t n, int k, int j, double eps);

/// Runs one trial; failures come back as censored records.
TrialRecord run_trial(const SweepSpec& spec, std::size_t n_index, std::size_t eps_index, std::size_t trial);

/// Every (n, eps, trial) in SweepSpec order; records reach `sink` in that order
/// whatever the number of jobs.
void run_sweep(const SweepSpec& spec, const std::function<void(const TrialRecord&)>& sink);
std::vector<TrialRecord> run_sweep(const SweepSpec& spec);

/// Interval [lower, upper] a record's L is compared with, if any.
using BoundLookup = std::function<std::optional<std::pair<double, double>>(std::uint32_t n, double eps)>;

/// Subcritical points use the two subcritical curves; supercritical ones the
/// supercritical lower (loose lower for j = 1) and upper curves.
BoundLookup theorem_bound_lookup(int k, int j, double delta, double omega);

struct SummaryRow {
  std::uint32_t n = 0;
  double eps = 0.0;
  std::size_t trials = 0;
  std::size_t censored = 0;
  double mean_length = 0.0;  // over uncensored records
  std::size_t min_length = 0;
  std::size_t max_length = 0;
  std::optional<double> lower;
  std::optional<double> upper;
  double fraction_within = 0.0;  // among uncensored records
  double censoring_rate = 0.0;
  double s1_rate = 0.0;
};

/// Groups by (n, eps) in order of first appearance. Censored records count
/// towards the censoring rate only.
std::vector<SummaryRow> aggregate(const std::vector<TrialRecord>& records, const BoundLookup& bounds);

void write_records_csv(std::ostream& os, const std::vector<TrialRecord>& records);
void write_record_csv_header(std::ostream& os);
void write_record_csv_row(std::ostream& os, const TrialRecord& r);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

/// Named sweeps: ac7, ac8, ac9, smoke.
const std::map<std::string, SweepSpec>& presets();

/// Applies flat key=value settings (keys as in SweepSpec; lists are
/// comma-separated). Unknown keys throw.
void apply_setting(SweepSpec& spec, const std::string& key, const std::string& value);

}  // namespace jtight
