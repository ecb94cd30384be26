#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <absl/container/flat_hash_set.h>

#include "jtight/combinatorics.hpp"
#include "jtight/hypergraph.hpp"
#include "jtight/keyed_hash.hpp"
#include "jtight/path.hpp"

namespace jtight {

enum class StopReason { S1, S2, S3, S4, Exhausted, Budget, NotApplicable };

std::string_view stop_reason_name(StopReason reason);
std::optional<StopReason> parse_stop_reason(std::string_view name);

/// Ordered split (C_0, C_1, ..., C_r) of a j-set with |C_0| = a and
/// |C_i| = k-j for i >= 1.
struct ExtendablePartition {
  std::vector<VertexSet> parts;

  JSet jset() const;
  bool valid_for(const StructuralParams& sp) const;

  friend bool operator==(const ExtendablePartition&, const ExtendablePartition&) = default;
};

/// C_0 = the a smallest vertices, then consecutive runs of k-j.
ExtendablePartition lexicographic_partition(const StructuralParams& sp, const JSet& jset);

struct ActivatedSet {
  JSet set;
  ExtendablePartition partition;

  friend bool operator==(const ActivatedSet&, const ActivatedSet&) = default;
};

/// The batch of j-sets made active when edge K is found from J. With r >= 1
/// each Z in C(C_1, a) yields Z + C_2 + ... + C_r + (K\J); with r = 0 the
/// batch is the a-subsets of K\J. Returned in lexicographic order of Z.
std::vector<ActivatedSet> activate_batch(const StructuralParams& sp, const JSet& from,
                                         const ExtendablePartition& partition, const KSet& found);

/// True when from + x contains an explored j-set (other than subsets of
/// `from` alone).
bool contains_explored_jset(const JSet& from, const VertexSet& x, int j,
                            const absl::flat_hash_set<JSet>& explored);

/// Direct evaluation of (Q1)-(Q4): every (k-j)-set X of [0,n) with X disjoint
/// from the path vertices and from J, X not queried from J, and J + X free of
/// explored j-sets. Lexicographic order.
std::vector<VertexSet> allowed_candidates(std::uint32_t n, int k, const JSet& from,
                                          std::span<const Vertex> path_vertices,
                                          const absl::flat_hash_set<JSet>& explored,
                                          const absl::flat_hash_set<VertexSet>& queried_from_j);

struct NewStartEvent {
  std::uint64_t t = 0;
  JSet set;
  ExtendablePartition partition;
  friend bool operator==(const NewStartEvent&, const NewStartEvent&) = default;
};

struct QueryEvent {
  std::uint64_t t = 0;  // clock value after this query
  JSet from;
  KSet kset;
  bool edge = false;
  friend bool operator==(const QueryEvent&, const QueryEvent&) = default;
};

struct BatchActivatedEvent {
  std::uint64_t t = 0;
  std::size_t length = 0;     // index l of the batch B_l (= new path length)
  std::vector<JSet> sets;     // pushed members, bottom to top
  friend bool operator==(const BatchActivatedEvent&, const BatchActivatedEvent&) = default;
};

struct BatchSkipEvent {
  std::uint64_t t = 0;
  std::size_t length = 0;
  JSet set;  // already discovered, not re-activated
  friend bool operator==(const BatchSkipEvent&, const BatchSkipEvent&) = default;
};

struct ExploredEvent {
  std::uint64_t t = 0;
  JSet set;
  friend bool operator==(const ExploredEvent&, const ExploredEvent&) = default;
};

struct EdgeRemovedEvent {
  std::uint64_t t = 0;
  std::size_t length = 0;  // index of the removed edge (path length before removal)
  friend bool operator==(const EdgeRemovedEvent&, const EdgeRemovedEvent&) = default;
};

struct StoppedEvent {
  std::uint64_t t = 0;
  StopReason reason = StopReason::Exhausted;
  friend bool operator==(const StoppedEvent&, const StoppedEvent&) = default;
};

using Event = std::variant<NewStartEvent, QueryEvent, BatchActivatedEvent, BatchSkipEvent, ExploredEvent,
                           EdgeRemovedEvent, StoppedEvent>;

std::uint64_t event_time(const Event& e);

/// A k-set priority under sigma_k: hash first, then lexicographic.
struct Priority {
  std::uint64_t hash = 0;
  KSet set;

  friend bool operator==(const Priority&, const Priority&) = default;
  friend bool operator<(const Priority& x, const Priority& y) {
    return x.hash != y.hash ? x.hash < y.hash : x.set < y.set;
  }
};

struct ActiveEntry {
  JSet set;
  ExtendablePartition partition;
  std::size_t batch = 0;  // i(J)
  // Every k-set queried from this J so far has priority <= last_query.
  std::optional<Priority> last_query;
};

/// Everything the search knows. Fields are public for inspection; only the
/// PathFinder mutates them.
struct PathFinderState {
  std::uint32_t n = 0;
  StructuralParams params;
  std::uint64_t t = 0;

  std::vector<ActiveEntry> active;  // stack, back() is the top
  absl::flat_hash_set<JSet> explored;
  absl::flat_hash_set<JSet> discovered;  // active or explored
  std::vector<std::size_t> batch_remaining;  // unexplored members of B_0..B_l

  // current path: start partition of the live tree, then one block per edge
  ExtendablePartition start;
  std::vector<KSet> edges;
  std::vector<VertexSet> blocks;  // e_i minus the j-set it was found from
  std::vector<std::uint8_t> in_path;
  std::size_t path_vertices = 0;

  std::size_t max_length = 0;
  std::uint64_t new_starts = 0;
  std::uint64_t positive_queries = 0;
  std::uint64_t standard = 0;  // batch members activated, counting skipped ones
  std::uint64_t skipped = 0;

  std::size_t length() const { return edges.size(); }
  bool live() const { return !active.empty(); }
  /// V(P) in no particular order (empty when no tree is live).
  std::vector<Vertex> path_vertex_list() const;
  /// The current path as a vertex sequence whose windows are `edges`.
  JTightPath current_path() const;
};

struct PathFinderOptions {
  /// Tried as new starts (in order, skipping discovered ones) before the
  /// sigma_j order takes over.
  std::vector<JSet> preferred_starts;
};

/// The depth-first search, advanced one step at a time. A step is a new
/// start, a single query, or the exploration of the top j-set.
class PathFinder {
 public:
  PathFinder(EdgeSource& h, int j, std::uint64_t seed, PathFinderOptions options = {});
  ~PathFinder();
  PathFinder(const PathFinder&) = delete;
  PathFinder& operator=(const PathFinder&) = delete;

  /// Events produced by the step; empty once no neutral j-set is left.
  std::span<const Event> step();
  bool finished() const { return finished_; }

  const PathFinderState& state() const { return state_; }
  /// The allowed family for the top of the stack, in sigma_k order.
  std::vector<VertexSet> allowed_candidates() const;
  std::uint64_t sigma_k(const KSet& kset) const { return sigma_k_(kset); }
  std::uint64_t sigma_j(const JSet& jset) const { return sigma_j_(jset); }

 private:
  class CandidateQueue;
  class NeutralOrder;

  void new_start();
  void query_top();
  void explore_top();
  void add_edge(const KSet& kset);
  void remove_last_edge();
  void build_queue();
  bool excluded(const JSet& from, const VertexSet& x) const;
  void mark(const VertexSet& s, std::uint8_t value);

  EdgeSource& h_;
  KeyedHash sigma_j_;
  KeyedHash sigma_k_;
  PathFinderOptions options_;
  PathFinderState state_;
  std::vector<std::vector<std::uint8_t>> q4_masks_;
  std::unique_ptr<CandidateQueue> queue_;
  bool queue_valid_ = false;
  std::unique_ptr<NeutralOrder> neutral_;
  std::size_t preferred_pos_ = 0;
  bool finished_ = false;
  std::vector<Event> events_;
};

}  // namespace jtight
