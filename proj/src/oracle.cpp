#include "jtight/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <limits>
#include <set>

namespace jtight {

JSetIndex::JSetIndex(const ExplicitHypergraph& h, int j) : k_(h.k()), j_(j) {
  if (j < 1 || j >= k_) throw std::invalid_argument("need 1 <= j <= k-1");
  bits_ = static_cast<unsigned>(std::bit_width(h.n()));
  if (bits_ * static_cast<unsigned>(j) > 64) throw std::invalid_argument("JSetIndex: j-sets do not pack into 64 bits");

  edges_ = h.sorted_edges();
  std::vector<std::pair<std::uint64_t, std::uint32_t>> pairs;
  for (std::uint32_t id = 0; id < edges_.size(); ++id) {
    for_each_subset(edges_[id].span(), static_cast<std::size_t>(j), [&](const JSet& sub) {
      pairs.emplace_back(pack(sub), id);
      return true;
    });
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  incidence_.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size();) {
    std::size_t end = i;
    while (end < pairs.size() && pairs[end].first == pairs[i].first) ++end;
    ranges_.emplace(pairs[i].first,
                    std::make_pair(static_cast<std::uint32_t>(incidence_.size()), static_cast<std::uint32_t>(end - i)));
    for (; i < end; ++i) incidence_.push_back(pairs[i].second);
  }
}

std::uint64_t JSetIndex::pack(const JSet& jset) const {
  std::uint64_t key = 0;
  for (Vertex v : jset) key = (key << bits_) | v;
  return key;
}

std::span<const std::uint32_t> JSetIndex::edges_containing(const JSet& jset) const {
  auto it = ranges_.find(pack(jset));
  if (it == ranges_.end()) return {};
  return {incidence_.data() + it->second.first, it->second.second};
}

std::vector<JSet> JSetIndex::keys() const {
  std::vector<JSet> out;
  out.reserve(ranges_.size());
  const std::uint64_t mask = bits_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits_) - 1;
  std::array<Vertex, kMaxUniformity> buf{};
  for (const auto& [key, range] : ranges_) {
    std::uint64_t x = key;
    for (int i = j_ - 1; i >= 0; --i) {
      buf[static_cast<std::size_t>(i)] = static_cast<Vertex>(x & mask);
      x >>= bits_;
    }
    out.push_back(JSet::from_sorted(std::span<const Vertex>(buf.data(), static_cast<std::size_t>(j_))));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Depth-first enumeration of labeled j-tight paths. `on_node` is called for
// every sequence reached (including bare starting j-tuples) and returns false
// to abort the whole search.
class PathSearch {
 public:
  PathSearch(const ExplicitHypergraph& h, int j, std::size_t max_length)
      : index_(h, j), k_(h.k()), j_(j), step_(h.k() - j), max_length_(max_length), used_(h.n(), 0) {}

  template <typename OnNode>
  void run(OnNode&& on_node) {
    for (const JSet& start : index_.keys()) {
      std::vector<Vertex> order(start.begin(), start.end());
      do {
        for (Vertex v : order) used_[v] = 1;
        seq_ = order;
        const bool keep_going = extend(on_node);
        for (Vertex v : order) used_[v] = 0;
        if (!keep_going) return;
      } while (std::next_permutation(order.begin(), order.end()));
    }
  }

 private:
  template <typename OnNode>
  bool extend(OnNode& on_node) {
    const std::size_t len = (seq_.size() - static_cast<std::size_t>(j_)) / static_cast<std::size_t>(step_);
    if (!on_node(std::span<const Vertex>(seq_), len)) return false;
    if (len >= max_length_) return true;
    const JSet tail = JSet::from_unsorted(
        std::span<const Vertex>(seq_.data() + seq_.size() - j_, static_cast<std::size_t>(j_)));
    for (std::uint32_t id : index_.edges_containing(tail)) {
      const VertexSet x = index_.edge(id).minus(tail);
      if (std::any_of(x.begin(), x.end(), [&](Vertex v) { return used_[v] != 0; })) continue;
      std::vector<Vertex> block(x.begin(), x.end());
      for (Vertex v : block) used_[v] = 1;
      bool keep_going = true;
      do {
        seq_.insert(seq_.end(), block.begin(), block.end());
        keep_going = extend(on_node);
        seq_.resize(seq_.size() - block.size());
      } while (keep_going && std::next_permutation(block.begin(), block.end()));
      for (Vertex v : block) used_[v] = 0;
      if (!keep_going) return false;
    }
    return true;
  }

  JSetIndex index_;
  int k_;
  int j_;
  int step_;
  std::size_t max_length_;
  std::vector<std::uint8_t> used_;
  std::vector<Vertex> seq_;
};

}  // namespace

LongestPathResult longest_path_exact(const ExplicitHypergraph& h, int j, std::uint64_t node_budget) {
  if (j < 1 || j >= h.k()) throw std::invalid_argument("need 1 <= j <= k-1");
  if (h.n() < static_cast<std::uint32_t>(j)) throw std::invalid_argument("need n >= j");
  LongestPathResult best;
  best.witness.resize(static_cast<std::size_t>(j));
  std::iota(best.witness.begin(), best.witness.end(), Vertex{0});

  PathSearch search(h, j, std::numeric_limits<std::size_t>::max());
  search.run([&](std::span<const Vertex> seq, std::size_t len) {
    if (++best.nodes > node_budget) {
      best.censored = true;
      return false;
    }
    if (len > best.length) {
      best.length = len;
      best.witness.assign(seq.begin(), seq.end());
    }
    return true;
  });
  if (best.nodes > node_budget) best.nodes = node_budget;
  return best;
}

void for_each_labeled_path(const ExplicitHypergraph& h, int j, std::size_t length,
                           const std::function<void(std::span<const Vertex>)>& visit) {
  if (j < 1 || j >= h.k()) throw std::invalid_argument("need 1 <= j <= k-1");
  if (length == 0) throw std::invalid_argument("for_each_labeled_path needs length >= 1");
  PathSearch search(h, j, length);
  search.run([&](std::span<const Vertex> seq, std::size_t len) {
    if (len == length) visit(seq);
    return true;
  });
}

std::uint64_t count_path_classes(const ExplicitHypergraph& h, int j, std::size_t length) {
  const int k = h.k();
  if (length == 0) {
    return binomial_exact(h.n(), static_cast<std::uint64_t>(j)).convert_to<std::uint64_t>();
  }
  std::set<std::vector<KSet>> classes;
  std::uint64_t labeled = 0;
  for_each_labeled_path(h, j, length, [&](std::span<const Vertex> seq) {
    ++labeled;
    JTightPath path(k, j, std::vector<Vertex>(seq.begin(), seq.end()));
    std::vector<KSet> edges = path.edges();
    std::sort(edges.begin(), edges.end());
    classes.insert(std::move(edges));
  });
  const BigInt z = z_ell(k, j, length);
  if (BigInt(labeled) != z * classes.size()) {
    throw std::logic_error("labeled path count is not classes * z_l");
  }
  return classes.size();
}

BigInt z_ell_bruteforce(int k, int j, std::size_t length) {
  const std::size_t v = path_vertex_count(k, j, length);
  if (v > 11) throw std::invalid_argument("z_ell_bruteforce supports at most 11 path vertices");
  std::vector<Vertex> reference(v);
  std::iota(reference.begin(), reference.end(), Vertex{0});
  const std::vector<KSet> edges = JTightPath(k, j, reference).edges();
  const std::size_t step = static_cast<std::size_t>(k - j);

  // Place vertices position by position; each time a window closes it must be
  // one of the reference edges. l distinct windows inside an l-edge set means
  // the edge sets coincide.
  std::vector<Vertex> order;
  std::vector<std::uint8_t> used(v, 0);
  std::uint64_t count = 0;
  auto place = [&](auto&& self) -> void {
    const std::size_t pos = order.size();
    if (pos == v) {
      ++count;
      return;
    }
    for (Vertex x = 0; x < v; ++x) {
      if (used[x]) continue;
      order.push_back(x);
      bool ok = true;
      if (pos + 1 >= static_cast<std::size_t>(k) && (pos + 1 - static_cast<std::size_t>(k)) % step == 0) {
        const KSet window = KSet::from_unsorted(
            std::span<const Vertex>(order.data() + pos + 1 - k, static_cast<std::size_t>(k)));
        ok = std::find(edges.begin(), edges.end(), window) != edges.end();
      }
      if (ok) {
        used[x] = 1;
        self(self);
        used[x] = 0;
      }
      order.pop_back();
    }
  };
  place(place);
  return BigInt(count);
}

MonteCarloEstimate expectation_monte_carlo(std::uint32_t n, int k, int j, std::size_t length, double p,
                                           std::size_t samples, std::uint64_t seed) {
  if (n > 12) throw std::invalid_argument("expectation_monte_carlo supports n <= 12");
  if (samples < 1000) throw std::invalid_argument("expectation_monte_carlo needs at least 1000 samples");
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const ExplicitHypergraph h = generate_explicit(n, k, p, derive_seed(seed, i));
    const double x = static_cast<double>(count_path_classes(h, j, length));
    sum += x;
    sum_sq += x * x;
  }
  MonteCarloEstimate out;
  out.samples = samples;
  out.mean = sum / static_cast<double>(samples);
  const double var = std::max(0.0, (sum_sq - sum * out.mean) / static_cast<double>(samples - 1));
  out.standard_error = std::sqrt(var / static_cast<double>(samples));
  return out;
}

}  // namespace jtight
