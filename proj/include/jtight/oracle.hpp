#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "jtight/combinatorics.hpp"
#include "jtight/hypergraph.hpp"

namespace jtight {

/// Adjacency from j-sets to the edges containing them, built once per
/// explicit hypergraph. Keys are packed into 64 bits.
class JSetIndex {
 public:
  JSetIndex(const ExplicitHypergraph& h, int j);

  int k() const { return k_; }
  int j() const { return j_; }
  /// Ids of the edges that contain the j-set.
  std::span<const std::uint32_t> edges_containing(const JSet& jset) const;
  const KSet& edge(std::uint32_t id) const { return edges_[id]; }
  /// j-sets that lie in at least one edge.
  std::vector<JSet> keys() const;

 private:
  std::uint64_t pack(const JSet& jset) const;

  int k_;
  int j_;
  unsigned bits_;
  std::vector<KSet> edges_;
  std::vector<std::uint32_t> incidence_;
  absl::flat_hash_map<std::uint64_t, std::pair<std::uint32_t, std::uint32_t>> ranges_;
};

struct LongestPathResult {
  std::size_t length = 0;
  std::vector<Vertex> witness;  // vertex sequence of a longest path found
  bool censored = false;        // node budget ran out; length is a lower bound
  std::uint64_t nodes = 0;      // search nodes expanded
};

inline constexpr std::uint64_t kDefaultOracleBudget = 100'000'000;

/// Exhaustive backtracking over vertex sequences, (k-j) vertices at a time.
LongestPathResult longest_path_exact(const ExplicitHypergraph& h, int j,
                                     std::uint64_t node_budget = kDefaultOracleBudget);

/// Calls visit(sequence) for every labeled j-tight path of exactly the given
/// length (length >= 1) in h.
void for_each_labeled_path(const ExplicitHypergraph& h, int j, std::size_t length,
                           const std::function<void(std::span<const Vertex>)>& visit);

/// Number of edge-set equivalence classes of length-l j-tight paths in h.
/// Checks that the labeled count is exactly classes * z_l.
std::uint64_t count_path_classes(const ExplicitHypergraph& h, int j, std::size_t length);

/// Size of the class of orderings of a reference path on v(l) labeled
/// vertices that induce the same edge set. Requires v(l) <= 11.
BigInt z_ell_bruteforce(int k, int j, std::size_t length);

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Sample mean and standard error of the number of path classes over
/// independent explicit samples of H^k(n,p). Requires n <= 12.
MonteCarloEstimate expectation_monte_carlo(std::uint32_t n, int k, int j, std::size_t length, double p,
                                           std::size_t samples, std::uint64_t seed);

}  // namespace jtight
