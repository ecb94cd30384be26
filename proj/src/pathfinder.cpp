#include "jtight/pathfinder.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include <absl/container/flat_hash_map.h>

namespace jtight {

std::string_view stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::S1: return "S1";
    case StopReason::S2: return "S2";
    case StopReason::S3: return "S3";
    case StopReason::S4: return "S4";
    case StopReason::Exhausted: return "exhausted";
    case StopReason::Budget: return "budget";
    case StopReason::NotApplicable: return "n/a";
  }
  return "n/a";
}

std::optional<StopReason> parse_stop_reason(std::string_view name) {
  for (StopReason r : {StopReason::S1, StopReason::S2, StopReason::S3, StopReason::S4, StopReason::Exhausted,
                       StopReason::Budget, StopReason::NotApplicable}) {
    if (stop_reason_name(r) == name) return r;
  }
  return std::nullopt;
}

JSet ExtendablePartition::jset() const {
  JSet out;
  for (const VertexSet& p : parts) out = out.united(p);
  return out;
}

bool ExtendablePartition::valid_for(const StructuralParams& sp) const {
  if (parts.size() != static_cast<std::size_t>(sp.r + 1)) return false;
  std::size_t total = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::size_t want = i == 0 ? static_cast<std::size_t>(sp.a) : static_cast<std::size_t>(sp.k - sp.j);
    if (parts[i].size() != want) return false;
    total += parts[i].size();
  }
  if (total != static_cast<std::size_t>(sp.j)) return false;
  return jset().size() == total;
}

ExtendablePartition lexicographic_partition(const StructuralParams& sp, const JSet& jset) {
  if (jset.size() != static_cast<std::size_t>(sp.j)) throw std::invalid_argument("start set must have j vertices");
  ExtendablePartition out;
  const std::span<const Vertex> v = jset.span();
  out.parts.push_back(VertexSet::from_sorted(v.subspan(0, static_cast<std::size_t>(sp.a))));
  for (int i = 0; i < sp.r; ++i) {
    const std::size_t off = static_cast<std::size_t>(sp.a + i * (sp.k - sp.j));
    out.parts.push_back(VertexSet::from_sorted(v.subspan(off, static_cast<std::size_t>(sp.k - sp.j))));
  }
  return out;
}

std::vector<ActivatedSet> activate_batch(const StructuralParams& sp, const JSet& from,
                                         const ExtendablePartition& partition, const KSet& found) {
  if (!partition.valid_for(sp) || partition.jset() != from) {
    throw std::invalid_argument("activate_batch: partition does not match the j-set");
  }
  if (found.size() != static_cast<std::size_t>(sp.k) || !found.contains_all(from)) {
    throw std::invalid_argument("activate_batch: found k-set must contain the j-set");
  }
  const VertexSet x = found.minus(from);
  std::vector<ActivatedSet> out;
  if (sp.r == 0) {
    for_each_subset(x.span(), static_cast<std::size_t>(sp.a), [&](const VertexSet& z) {
      out.push_back({z, ExtendablePartition{{z}}});
      return true;
    });
    return out;
  }
  VertexSet rest;
  for (std::size_t i = 2; i < partition.parts.size(); ++i) rest = rest.united(partition.parts[i]);
  rest = rest.united(x);
  for_each_subset(partition.parts[1].span(), static_cast<std::size_t>(sp.a), [&](const VertexSet& z) {
    ExtendablePartition p;
    p.parts.push_back(z);
    for (std::size_t i = 2; i < partition.parts.size(); ++i) p.parts.push_back(partition.parts[i]);
    p.parts.push_back(x);
    out.push_back({z.united(rest), std::move(p)});
    return true;
  });
  return out;
}

bool contains_explored_jset(const JSet& from, const VertexSet& x, int j,
                            const absl::flat_hash_set<JSet>& explored) {
  if (explored.empty()) return false;
  std::array<Vertex, kMaxUniformity> all{};
  std::copy(from.begin(), from.end(), all.begin());
  std::copy(x.begin(), x.end(), all.begin() + static_cast<std::ptrdiff_t>(from.size()));
  const std::size_t total = from.size() + x.size();
  std::array<Vertex, kMaxUniformity> buf{};
  bool hit = false;
  for_each_index_combination(total, static_cast<std::size_t>(j), [&](std::span<const std::size_t> idx) {
    if (idx.back() < from.size()) return true;  // lies inside `from`
    for (std::size_t i = 0; i < idx.size(); ++i) buf[i] = all[idx[i]];
    hit = explored.contains(VertexSet::from_unsorted(std::span<const Vertex>(buf.data(), idx.size())));
    return !hit;
  });
  return hit;
}

std::vector<VertexSet> allowed_candidates(std::uint32_t n, int k, const JSet& from,
                                          std::span<const Vertex> path_vertices,
                                          const absl::flat_hash_set<JSet>& explored,
                                          const absl::flat_hash_set<VertexSet>& queried_from_j) {
  const int j = static_cast<int>(from.size());
  std::vector<std::uint8_t> blocked(n, 0);
  for (Vertex v : path_vertices) blocked.at(v) = 1;
  for (Vertex v : from) blocked.at(v) = 1;
  std::vector<Vertex> free;
  for (Vertex v = 0; v < n; ++v) {
    if (!blocked[v]) free.push_back(v);
  }
  std::vector<VertexSet> out;
  for_each_subset(std::span<const Vertex>(free), static_cast<std::size_t>(k - j), [&](const VertexSet& x) {
    if (!queried_from_j.contains(x) && !contains_explored_jset(from, x, j, explored)) out.push_back(x);
    return true;
  });
  return out;
}

std::uint64_t event_time(const Event& e) {
  return std::visit([](const auto& ev) { return ev.t; }, e);
}

std::vector<Vertex> PathFinderState::path_vertex_list() const {
  std::vector<Vertex> out;
  if (!live()) return out;
  for (const VertexSet& p : start.parts) out.insert(out.end(), p.begin(), p.end());
  for (const VertexSet& b : blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

JTightPath PathFinderState::current_path() const {
  if (!live()) throw std::logic_error("current_path: no live search tree");
  // Within each block, vertices that leave the path's edges earlier come first.
  absl::flat_hash_map<Vertex, std::size_t> last_edge;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    for (Vertex v : edges[i]) last_edge[v] = i + 1;
  }
  auto rank = [&](Vertex v) {
    auto it = last_edge.find(v);
    return std::make_pair(it == last_edge.end() ? std::size_t{0} : it->second, v);
  };
  std::vector<Vertex> seq;
  auto append = [&](const VertexSet& block) {
    std::vector<Vertex> part(block.begin(), block.end());
    std::sort(part.begin(), part.end(), [&](Vertex x, Vertex y) { return rank(x) < rank(y); });
    seq.insert(seq.end(), part.begin(), part.end());
  };
  for (const VertexSet& p : start.parts) append(p);
  for (const VertexSet& b : blocks) append(b);
  return JTightPath(params.k, params.j, std::move(seq));
}

// Candidates of one session of the top j-set, ordered by sigma_k. Items are
// bucketed by the top bits of the hash and each bucket is sorted on first use,
// since a session often ends long before the queue drains.
class PathFinder::CandidateQueue {
 public:
  explicit CandidateQueue(std::size_t width) : width_(width) {}

  void clear() {
    items_.clear();
    xs_.clear();
    bounds_.clear();
    pos_ = sorted_end_ = next_bucket_ = 0;
  }

  void add(std::uint64_t hash, const VertexSet& x) {
    items_.push_back({hash, items_.size()});
    xs_.insert(xs_.end(), x.begin(), x.end());
  }

  void finalize(const JSet& from) {
    from_ = from;
    unsigned bits = 0;
    if (items_.size() > 4096) bits = static_cast<unsigned>(std::bit_width(items_.size() / 64)) - 1;
    bits = std::min(bits, 24u);
    const std::size_t buckets = std::size_t{1} << bits;
    bounds_.assign(buckets + 1, 0);
    if (bits == 0) {
      bounds_[1] = items_.size();
      return;
    }
    const unsigned shift = 64 - bits;
    for (const Item& it : items_) ++bounds_[(it.hash >> shift) + 1];
    for (std::size_t b = 0; b < buckets; ++b) bounds_[b + 1] += bounds_[b];
    std::vector<Item> sorted(items_.size());
    std::vector<std::size_t> fill(bounds_.begin(), bounds_.end() - 1);
    for (const Item& it : items_) sorted[fill[it.hash >> shift]++] = it;
    items_.swap(sorted);
  }

  /// Next candidate X and its k-set hash; false when drained.
  bool pop(std::uint64_t& hash, VertexSet& x) {
    while (pos_ == sorted_end_) {
      if (next_bucket_ + 1 >= bounds_.size()) return false;
      const auto first = items_.begin() + static_cast<std::ptrdiff_t>(bounds_[next_bucket_]);
      const auto last = items_.begin() + static_cast<std::ptrdiff_t>(bounds_[next_bucket_ + 1]);
      std::sort(first, last, [&](const Item& p, const Item& q) {
        if (p.hash != q.hash) return p.hash < q.hash;
        return from_.united(x_of(p)) < from_.united(x_of(q));
      });
      sorted_end_ = bounds_[next_bucket_ + 1];
      ++next_bucket_;
    }
    const Item& it = items_[pos_++];
    hash = it.hash;
    x = x_of(it);
    return true;
  }

 private:
  struct Item {
    std::uint64_t hash;
    std::size_t index;
  };

  VertexSet x_of(const Item& it) const {
    return VertexSet::from_sorted(std::span<const Vertex>(xs_.data() + it.index * width_, width_));
  }

  std::size_t width_;
  JSet from_;
  std::vector<Item> items_;
  std::vector<Vertex> xs_;
  std::vector<std::size_t> bounds_;
  std::size_t pos_ = 0;
  std::size_t sorted_end_ = 0;
  std::size_t next_bucket_ = 0;
};

// sigma_j order over all C(n,j) j-sets. The hash range is cut into chunks by
// its top bits; a chunk is collected by a full scan, sorted, and consumed
// before the next one is scanned.
class PathFinder::NeutralOrder {
 public:
  NeutralOrder(std::uint32_t n, int j, const KeyedHash& sigma) : n_(n), j_(j), sigma_(sigma) {
    const double total = binomial_double(n, static_cast<std::uint64_t>(j));
    if (total > 65536.0) bits_ = std::min(30u, static_cast<unsigned>(std::ceil(std::log2(total / 65536.0))));
    chunks_ = std::uint64_t{1} << bits_;
  }

  std::optional<JSet> next(const absl::flat_hash_set<JSet>& discovered) {
    while (true) {
      while (pos_ < buffer_.size()) {
        const JSet& s = buffer_[pos_++].second;
        if (!discovered.contains(s)) return s;
      }
      if (next_chunk_ >= chunks_) return std::nullopt;
      load(next_chunk_++);
    }
  }

 private:
  void load(std::uint64_t chunk) {
    buffer_.clear();
    pos_ = 0;
    std::array<Vertex, kMaxUniformity> buf{};
    for_each_index_combination(n_, static_cast<std::size_t>(j_), [&](std::span<const std::size_t> idx) {
      for (std::size_t i = 0; i < idx.size(); ++i) buf[i] = static_cast<Vertex>(idx[i]);
      const JSet s = JSet::from_sorted(std::span<const Vertex>(buf.data(), idx.size()));
      const std::uint64_t h = sigma_(s);
      if (bits_ == 0 || (h >> (64 - bits_)) == chunk) buffer_.emplace_back(h, s);
      return true;
    });
    std::sort(buffer_.begin(), buffer_.end());
  }

  std::uint32_t n_;
  int j_;
  KeyedHash sigma_;
  unsigned bits_ = 0;
  std::uint64_t chunks_ = 1;
  std::uint64_t next_chunk_ = 0;
  std::vector<std::pair<std::uint64_t, JSet>> buffer_;
  std::size_t pos_ = 0;
};

PathFinder::PathFinder(EdgeSource& h, int j, std::uint64_t seed, PathFinderOptions options)
    : h_(h), sigma_j_(seed, "sigma-j"), sigma_k_(seed, "sigma-k"), options_(std::move(options)) {
  state_.n = h.n();
  state_.params = structural_params(h.k(), j);
  state_.in_path.assign(h.n(), 0);
  for (const JSet& s : options_.preferred_starts) {
    if (s.size() != static_cast<std::size_t>(j) || (!s.empty() && s[s.size() - 1] >= h.n())) {
      throw std::invalid_argument("preferred start is not a j-subset of [0, n)");
    }
  }
  const int k = h.k();
  for_each_index_combination(static_cast<std::size_t>(k), static_cast<std::size_t>(j),
                             [&](std::span<const std::size_t> idx) {
                               if (idx.back() >= static_cast<std::size_t>(j)) {
                                 q4_masks_.emplace_back(idx.begin(), idx.end());
                               }
                               return true;
                             });
  queue_ = std::make_unique<CandidateQueue>(static_cast<std::size_t>(k - j));
  neutral_ = std::make_unique<NeutralOrder>(h.n(), j, sigma_j_);
}

PathFinder::~PathFinder() = default;

std::span<const Event> PathFinder::step() {
  events_.clear();
  if (finished_) return {};
  if (state_.active.empty()) {
    new_start();
  } else {
    query_top();
  }
  return events_;
}

void PathFinder::mark(const VertexSet& s, std::uint8_t value) {
  for (Vertex v : s) state_.in_path[v] = value;
}

bool PathFinder::excluded(const JSet& from, const VertexSet& x) const {
  if (state_.explored.empty()) return false;
  std::array<Vertex, kMaxUniformity> all{};
  std::copy(from.begin(), from.end(), all.begin());
  std::copy(x.begin(), x.end(), all.begin() + static_cast<std::ptrdiff_t>(from.size()));
  std::array<Vertex, kMaxUniformity> buf{};
  for (const auto& mask : q4_masks_) {
    for (std::size_t i = 0; i < mask.size(); ++i) buf[i] = all[mask[i]];
    if (state_.explored.contains(VertexSet::from_unsorted(std::span<const Vertex>(buf.data(), mask.size())))) {
      return true;
    }
  }
  return false;
}

namespace {

// Calls fn(x, hash) for every X allowed for the top entry: off the path, no
// explored j-set inside J + X, and above the entry's last queried priority.
template <typename Excluded, typename Fn>
void for_each_allowed(const PathFinderState& st, const KeyedHash& sigma_k, Excluded&& excluded, Fn&& fn) {
  const ActiveEntry& top = st.active.back();
  std::vector<Vertex> free;
  free.reserve(st.n);
  for (Vertex v = 0; v < st.n; ++v) {
    if (!st.in_path[v]) free.push_back(v);
  }
  const std::size_t width = static_cast<std::size_t>(st.params.k - st.params.j);
  std::array<Vertex, kMaxUniformity> buf{};
  for_each_index_combination(free.size(), width, [&](std::span<const std::size_t> idx) {
    for (std::size_t i = 0; i < width; ++i) buf[i] = free[idx[i]];
    const VertexSet x = VertexSet::from_sorted(std::span<const Vertex>(buf.data(), width));
    if (excluded(top.set, x)) return true;
    const KSet kset = top.set.united(x);
    const std::uint64_t h = sigma_k(kset);
    if (top.last_query) {
      const Priority& last = *top.last_query;
      if (h < last.hash || (h == last.hash && !(last.set < kset))) return true;
    }
    fn(x, h);
    return true;
  });
}

}  // namespace

std::vector<VertexSet> PathFinder::allowed_candidates() const {
  if (state_.active.empty()) return {};
  std::vector<Priority> found;
  const JSet& from = state_.active.back().set;
  for_each_allowed(
      state_, sigma_k_, [&](const JSet& f, const VertexSet& x) { return excluded(f, x); },
      [&](const VertexSet& x, std::uint64_t h) { found.push_back({h, from.united(x)}); });
  std::sort(found.begin(), found.end());
  std::vector<VertexSet> out;
  out.reserve(found.size());
  for (const Priority& p : found) out.push_back(p.set.minus(from));
  return out;
}

void PathFinder::build_queue() {
  queue_->clear();
  for_each_allowed(
      state_, sigma_k_, [&](const JSet& f, const VertexSet& x) { return excluded(f, x); },
      [&](const VertexSet& x, std::uint64_t h) { queue_->add(h, x); });
  queue_->finalize(state_.active.back().set);
  queue_valid_ = true;
}

void PathFinder::new_start() {
  std::optional<JSet> start;
  while (!start && preferred_pos_ < options_.preferred_starts.size()) {
    const JSet& s = options_.preferred_starts[preferred_pos_++];
    if (!state_.discovered.contains(s)) start = s;
  }
  if (!start) start = neutral_->next(state_.discovered);
  if (!start) {
    finished_ = true;
    return;
  }
  ExtendablePartition partition = lexicographic_partition(state_.params, *start);
  state_.discovered.insert(*start);
  state_.active.push_back({*start, partition, 0, std::nullopt});
  state_.batch_remaining.assign(1, 1);
  state_.start = partition;
  mark(*start, 1);
  state_.path_vertices = static_cast<std::size_t>(state_.params.j);
  ++state_.new_starts;
  events_.push_back(NewStartEvent{state_.t, *start, std::move(partition)});
  queue_valid_ = false;
}

void PathFinder::query_top() {
  if (!queue_valid_) build_queue();
  std::uint64_t hash = 0;
  VertexSet x;
  if (!queue_->pop(hash, x)) {
    explore_top();
    return;
  }
  ActiveEntry& top = state_.active.back();
  const KSet kset = top.set.united(x);
  const bool edge = h_.query_edge(kset);
  ++state_.t;
  top.last_query = Priority{hash, kset};
  events_.push_back(QueryEvent{state_.t, top.set, kset, edge});
  if (edge) {
    ++state_.positive_queries;
    add_edge(kset);
  }
}

void PathFinder::add_edge(const KSet& kset) {
  const JSet from = state_.active.back().set;
  const ExtendablePartition partition = state_.active.back().partition;
  const VertexSet x = kset.minus(from);
  state_.edges.push_back(kset);
  state_.blocks.push_back(x);
  mark(x, 1);
  state_.path_vertices += x.size();
  const std::size_t len = state_.edges.size();
  state_.max_length = std::max(state_.max_length, len);

  std::vector<ActivatedSet> batch = activate_batch(state_.params, from, partition, kset);
  // push in decreasing sigma_j order so the least member ends on top
  std::vector<std::pair<std::uint64_t, std::size_t>> order;
  for (std::size_t i = 0; i < batch.size(); ++i) order.emplace_back(sigma_j_(batch[i].set), i);
  std::sort(order.begin(), order.end(), [&](const auto& p, const auto& q) {
    if (p.first != q.first) return p.first > q.first;
    return batch[q.second].set < batch[p.second].set;
  });

  BatchActivatedEvent activated{state_.t, len, {}};
  std::vector<Event> skips;
  for (const auto& [h, i] : order) {
    ActivatedSet& member = batch[i];
    ++state_.standard;
    if (state_.discovered.contains(member.set)) {
      ++state_.skipped;
      skips.push_back(BatchSkipEvent{state_.t, len, member.set});
      continue;
    }
    state_.discovered.insert(member.set);
    activated.sets.push_back(member.set);
    state_.active.push_back({member.set, std::move(member.partition), len, std::nullopt});
  }
  const std::size_t pushed = activated.sets.size();
  state_.batch_remaining.push_back(pushed);
  events_.push_back(std::move(activated));
  for (Event& e : skips) events_.push_back(std::move(e));
  if (pushed == 0) {
    events_.push_back(EdgeRemovedEvent{state_.t, len});
    remove_last_edge();
  }
  queue_valid_ = false;
}

void PathFinder::remove_last_edge() {
  mark(state_.blocks.back(), 0);
  state_.path_vertices -= state_.blocks.back().size();
  state_.blocks.pop_back();
  state_.edges.pop_back();
  state_.batch_remaining.pop_back();
}

void PathFinder::explore_top() {
  ActiveEntry top = std::move(state_.active.back());
  state_.active.pop_back();
  state_.explored.insert(top.set);
  events_.push_back(ExploredEvent{state_.t, top.set});
  const std::size_t i = top.batch;
  assert(i + 1 == state_.batch_remaining.size());
  if (--state_.batch_remaining[i] == 0) {
    if (i >= 1) {
      events_.push_back(EdgeRemovedEvent{state_.t, i});
      remove_last_edge();
    } else {
      assert(state_.active.empty() && state_.edges.empty());
      for (const VertexSet& p : state_.start.parts) mark(p, 0);
      state_.start = {};
      state_.path_vertices = 0;
      state_.batch_remaining.clear();
    }
  }
  queue_valid_ = false;
}

}  // namespace jtight
