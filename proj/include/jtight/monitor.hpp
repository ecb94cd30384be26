#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <absl/container/flat_hash_map.h>
#include <absl/container/flat_hash_set.h>

#include "jtight/combinatorics.hpp"
#include "jtight/pathfinder.hpp"

namespace jtight {

/// C_{k,j,0} = 40((k-j)!)^2 and C_{k,j,i} = 2^(3k+4) k! C_{k,j,i-1}.
std::vector<double> default_c_ladder(int k, int j);

struct StoppingConfig {
  double target_length = std::numeric_limits<double>::infinity();  // S1
  double t0 = std::numeric_limits<double>::infinity();             // S2
  double beta = 0.1;
  std::vector<double> c_ladder;  // C_{k,j,0..j-1}; empty means default_c_ladder
  std::array<bool, 4> enabled{true, true, false, false};  // S1..S4
  std::uint64_t budget = std::numeric_limits<std::uint64_t>::max();
  /// Maintain degree trackers (and record S3/S4 trigger times) even when
  /// S3/S4 do not stop the run.
  bool track_degrees = false;

  bool is_enabled(StopReason r) const;
  void enable(StopReason r, bool on = true);
  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate(int k, int j) const;
  std::vector<double> ladder(int k, int j) const;

  /// S1 target and S2 cap for p = (1+eps)p0: for j >= 2 target
  /// (1-delta)eps n/(k-j)^2 and T0 = n^(k-j+1)/eps; for j = 1 target
  /// (1-delta)eps^2 n/(4(k-1)^2) and T0 = eps n C(n-1,k-1)/(2(k-1)).
  static StoppingConfig supercritical(std::uint32_t n, int k, int j, double eps, double delta);
};

/// d_t(I) for every i-set I with i < j: the number of discovered j-sets
/// containing I. d(empty set) is the discovered count.
class DegreeTracker {
 public:
  explicit DegreeTracker(int j);

  /// Rejects a j-set that was already added.
  void add(const JSet& jset);
  std::uint64_t degree(const VertexSet& subset) const;
  std::uint64_t discovered() const { return total_; }
  /// Sum of d(I) over the i-sets seen so far.
  std::uint64_t degree_sum(int i) const;
  /// max d(I) over the i-subsets I of `within`.
  std::uint64_t max_degree_within(const JSet& within, int i) const;
  /// Subsets whose degree changed since the previous call.
  std::vector<VertexSet> take_touched();

 private:
  void touch(const VertexSet& s);

  int j_;
  std::uint64_t total_ = 0;
  absl::flat_hash_set<JSet> seen_;
  std::vector<absl::flat_hash_map<VertexSet, std::uint64_t>> by_size_;  // index i in [1, j-1]
  std::vector<VertexSet> touched_;
  absl::flat_hash_set<VertexSet> touched_set_;
};

struct ForbiddenCounters {
  BigInt f1;        // (k-j)-sets X meeting V(P)\J
  BigInt f1_bound;  // l (k-j) C(n-j-1, k-j-1)
  BigInt f2_bound;
  std::optional<std::uint64_t> f2_exact;  // X with J+X containing an explored j-set
};

inline constexpr std::uint64_t kForbiddenExactLimit = 1'000'000;

/// Counters for the top of the stack. Degrees come from `degrees`, which
/// must have seen every discovered j-set.
ForbiddenCounters forbidden_counts(const PathFinderState& state, const DegreeTracker& degrees,
                                   std::uint64_t exact_limit = kForbiddenExactLimit);

/// Follows the event stream of one run: new-start count R_t, standard count
/// S_t, degrees, and the stopping conditions.
class Monitor {
 public:
  Monitor(std::uint32_t n, int k, int j, StoppingConfig config);

  void observe(const Event& event);
  /// First enabled condition that holds, in the order S1..S4. Trigger
  /// times of all tracked conditions are recorded along the way.
  std::optional<StopReason> check_stop(const PathFinderState& state);

  std::uint64_t new_starts() const { return r_; }
  std::uint64_t standard() const { return s_; }
  const DegreeTracker* degrees() const { return degrees_ ? &*degrees_ : nullptr; }
  const StoppingConfig& config() const { return config_; }
  /// Query time at which S1..S4 first held (index 0..3).
  const std::array<std::optional<std::uint64_t>, 4>& first_trigger() const { return first_; }

  double s3_threshold(std::uint64_t t) const;
  double s4_threshold(std::uint64_t t, int i) const;

 private:
  std::uint32_t n_;
  int k_;
  int j_;
  StoppingConfig config_;
  std::vector<double> ladder_;
  double n_beta_;
  std::uint64_t r_ = 0;
  std::uint64_t s_ = 0;
  std::optional<DegreeTracker> degrees_;
  std::array<std::optional<std::uint64_t>, 4> first_{};
};

}  // namespace jtight
