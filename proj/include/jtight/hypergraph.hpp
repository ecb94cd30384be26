#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include <absl/container/flat_hash_map.h>
#include <absl/container/flat_hash_set.h>

#include "jtight/keyed_hash.hpp"
#include "jtight/vertex_set.hpp"

namespace jtight {

/// Anything that can answer "is this k-set an edge".
class EdgeSource {
 public:
  virtual ~EdgeSource() = default;
  virtual std::uint32_t n() const = 0;
  virtual int k() const = 0;
  /// K must be a canonical k-subset of [0, n).
  virtual bool query_edge(const KSet& kset) = 0;
};

/// Explicitly stored hypergraph; immutable once built and safe to share.
class ExplicitHypergraph final : public EdgeSource {
 public:
  ExplicitHypergraph(std::uint32_t n, int k);

  std::uint32_t n() const override { return n_; }
  int k() const override { return k_; }
  bool query_edge(const KSet& kset) override { return contains(kset); }

  bool contains(const KSet& kset) const;
  void add_edge(const KSet& kset);
  std::size_t edge_count() const { return edges_.size(); }
  /// Edges in lexicographic order.
  std::vector<KSet> sorted_edges() const;

  /// Returns the hypergraph with every vertex v renamed to perm[v].
  ExplicitHypergraph relabeled(const std::vector<Vertex>& perm) const;

 private:
  std::uint32_t n_;
  int k_;
  absl::flat_hash_set<KSet> edges_;
};

/// H^k(n,p) revealed on demand: each k-set's status is a keyed coin flip,
/// so the same seed always yields the same hypergraph.
class LazyHypergraph final : public EdgeSource {
 public:
  /// With record_reveals set, every answered k-set is remembered so repeat
  /// queries can be counted (verification runs only).
  LazyHypergraph(std::uint32_t n, int k, double p, std::uint64_t seed, bool record_reveals = false);

  std::uint32_t n() const override { return n_; }
  int k() const override { return k_; }
  bool query_edge(const KSet& kset) override;

  /// The coin outcome without recording anything.
  bool coin(const KSet& kset) const { return coin_.unit(kset) < p_; }

  double p() const { return p_; }
  std::uint64_t queries() const { return queries_; }
  std::uint64_t repeat_queries() const { return repeats_; }
  std::size_t revealed_count() const { return revealed_.size(); }

 private:
  std::uint32_t n_;
  int k_;
  double p_;
  KeyedHash coin_;
  bool record_;
  std::uint64_t queries_ = 0;
  std::uint64_t repeats_ = 0;
  absl::flat_hash_map<KSet, bool> revealed_;
};

class GenerationBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 100'000'000;

/// Enumerates all C(n,k) k-sets and keeps those whose keyed coin (same as
/// LazyHypergraph with the same seed) comes up heads.
ExplicitHypergraph generate_explicit(std::uint32_t n, int k, double p, std::uint64_t seed,
                                     std::uint64_t budget = kDefaultEnumerationBudget);

/// Samples H^k(n,p) by geometric skipping over the colex ranks of k-sets;
/// cost is proportional to the number of edges. Not coin-compatible with
/// LazyHypergraph.
ExplicitHypergraph generate_sparse(std::uint32_t n, int k, double p, std::uint64_t seed);

/// |E(H)|; throws std::logic_error for a lazy backend.
std::size_t edge_count(const EdgeSource& h);

/// Text format: header "n k", then one edge per line as sorted 0-based ids.
void write_hypergraph(std::ostream& os, const ExplicitHypergraph& h);
ExplicitHypergraph read_hypergraph(std::istream& is);

}  // namespace jtight
