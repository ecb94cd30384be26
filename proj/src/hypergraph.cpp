#include "jtight/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "jtight/combinatorics.hpp"

namespace jtight {
namespace {

void check_kset(const KSet& kset, std::uint32_t n, int k) {
  if (static_cast<int>(kset.size()) != k) throw std::invalid_argument("k-set has wrong size");
  if (!kset.empty() && kset[kset.size() - 1] >= n) throw std::invalid_argument("k-set vertex out of range");
}

void check_shape(std::uint32_t n, int k) {
  if (k < 1 || k > static_cast<int>(kMaxUniformity)) throw std::invalid_argument("unsupported uniformity k");
  if (n < static_cast<std::uint32_t>(k)) throw std::invalid_argument("need n >= k");
}

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("edge probability must lie in [0, 1]");
}

// C(c, i) saturating at UINT64_MAX.
std::uint64_t binom_sat(std::uint64_t c, std::uint64_t i) {
  if (i > c) return 0;
  unsigned __int128 acc = 1;
  for (std::uint64_t q = 1; q <= i; ++q) {
    acc = acc * (c - i + q) / q;
    if (acc > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(acc);
}

// The k-set of colex rank `rank` among k-subsets of [0, n).
KSet colex_unrank(std::uint64_t rank, std::uint32_t n, int k) {
  std::array<Vertex, kMaxUniformity> out{};
  std::uint64_t hi = n;
  for (int i = k; i >= 1; --i) {
    // largest c < hi with C(c, i) <= rank
    std::uint64_t lo = static_cast<std::uint64_t>(i - 1), up = hi - 1;
    while (lo < up) {
      const std::uint64_t mid = lo + (up - lo + 1) / 2;
      if (binom_sat(mid, static_cast<std::uint64_t>(i)) <= rank) lo = mid; else up = mid - 1;
    }
    out[static_cast<std::size_t>(i - 1)] = static_cast<Vertex>(lo);
    rank -= binom_sat(lo, static_cast<std::uint64_t>(i));
    hi = lo;
  }
  return KSet::from_sorted(std::span<const Vertex>(out.data(), static_cast<std::size_t>(k)));
}

}  // namespace

std::ostream& operator<<(std::ostream& os, const VertexSet& s) {
  os << '{';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  return os << '}';
}

ExplicitHypergraph::ExplicitHypergraph(std::uint32_t n, int k) : n_(n), k_(k) { check_shape(n, k); }

bool ExplicitHypergraph::contains(const KSet& kset) const {
  check_kset(kset, n_, k_);
  return edges_.contains(kset);
}

void ExplicitHypergraph::add_edge(const KSet& kset) {
  check_kset(kset, n_, k_);
  edges_.insert(kset);
}

std::vector<KSet> ExplicitHypergraph::sorted_edges() const {
  std::vector<KSet> out(edges_.begin(), edges_.end());
  std::sort(out.begin(), out.end());
  return out;
}

ExplicitHypergraph ExplicitHypergraph::relabeled(const std::vector<Vertex>& perm) const {
  if (perm.size() != n_) throw std::invalid_argument("relabeling must cover all vertices");
  ExplicitHypergraph out(n_, k_);
  std::array<Vertex, kMaxUniformity> buf{};
  for (const KSet& e : edges_) {
    for (std::size_t i = 0; i < e.size(); ++i) buf[i] = perm.at(e[i]);
    out.add_edge(KSet::from_unsorted(std::span<const Vertex>(buf.data(), e.size())));
  }
  return out;
}

LazyHypergraph::LazyHypergraph(std::uint32_t n, int k, double p, std::uint64_t seed, bool record_reveals)
    : n_(n), k_(k), p_(p), coin_(seed, "edge-coin"), record_(record_reveals) {
  check_shape(n, k);
  check_probability(p);
}

bool LazyHypergraph::query_edge(const KSet& kset) {
  check_kset(kset, n_, k_);
  ++queries_;
  if (!record_) return coin(kset);
  auto [it, inserted] = revealed_.try_emplace(kset, false);
  if (inserted) {
    it->second = coin(kset);
  } else {
    ++repeats_;
  }
  return it->second;
}

ExplicitHypergraph generate_explicit(std::uint32_t n, int k, double p, std::uint64_t seed,
                                     std::uint64_t budget) {
  check_shape(n, k);
  check_probability(p);
  const std::uint64_t total = binom_sat(n, static_cast<std::uint64_t>(k));
  if (total > budget) {
    throw GenerationBudgetExceeded("C(n,k) = " + std::to_string(total) +
                                   " exceeds the enumeration budget; use the lazy backend");
  }
  ExplicitHypergraph h(n, k);
  const KeyedHash coin(seed, "edge-coin");
  std::vector<Vertex> all(n);
  std::iota(all.begin(), all.end(), Vertex{0});
  for_each_subset(std::span<const Vertex>(all), static_cast<std::size_t>(k), [&](const KSet& s) {
    if (coin.unit(s) < p) h.add_edge(s);
    return true;
  });
  return h;
}

ExplicitHypergraph generate_sparse(std::uint32_t n, int k, double p, std::uint64_t seed) {
  check_shape(n, k);
  check_probability(p);
  ExplicitHypergraph h(n, k);
  const std::uint64_t total = binom_sat(n, static_cast<std::uint64_t>(k));
  if (total >= (std::uint64_t{1} << 62)) throw std::invalid_argument("C(n,k) too large for sparse sampling");
  if (p <= 0.0) return h;
  std::mt19937_64 rng(seed);
  if (p >= 1.0) {
    for (std::uint64_t r = 0; r < total; ++r) h.add_edge(colex_unrank(r, n, k));
    return h;
  }
  std::geometric_distribution<std::uint64_t> gap(p);
  std::uint64_t pos = gap(rng);
  while (pos < total) {
    h.add_edge(colex_unrank(pos, n, k));
    const std::uint64_t skip = gap(rng);
    if (skip >= total - pos) break;
    pos += skip + 1;
  }
  return h;
}

std::size_t edge_count(const EdgeSource& h) {
  if (const auto* ex = dynamic_cast<const ExplicitHypergraph*>(&h)) return ex->edge_count();
  throw std::logic_error("edge_count is only defined for explicit hypergraphs");
}

void write_hypergraph(std::ostream& os, const ExplicitHypergraph& h) {
  os << h.n() << ' ' << h.k() << '\n';
  for (const KSet& e : h.sorted_edges()) {
    for (std::size_t i = 0; i < e.size(); ++i) os << (i ? " " : "") << e[i];
    os << '\n';
  }
}

ExplicitHypergraph read_hypergraph(std::istream& is) {
  std::string line;
  std::uint32_t n = 0;
  int k = 0;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream header(line);
    if (!(header >> n >> k)) throw std::runtime_error("hypergraph file: bad header");
    break;
  }
  if (k == 0) throw std::runtime_error("hypergraph file: missing header");
  ExplicitHypergraph h(n, k);
  std::vector<Vertex> buf;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    buf.clear();
    long long v;
    while (row >> v) {
      if (v < 0 || v >= static_cast<long long>(n)) {
        throw std::runtime_error("hypergraph file: vertex out of range on line " + std::to_string(line_no));
      }
      buf.push_back(static_cast<Vertex>(v));
    }
    if (static_cast<int>(buf.size()) != k || !std::is_sorted(buf.begin(), buf.end())) {
      throw std::runtime_error("hypergraph file: malformed edge on line " + std::to_string(line_no));
    }
    h.add_edge(KSet::from_unsorted(buf));
  }
  return h;
}

}  // namespace jtight
