#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace jtight {

struct SuiteResult {
  std::size_t passed = 0;
  std::size_t total = 0;
  std::size_t equalities = 0;  // oracle-bound suite: runs where max_l equals the optimum
  std::vector<std::string> failures;

  bool ok() const { return passed == total; }
};

/// Closed-form z_l against brute force for 2 <= k <= max_k, every j and
/// every l >= s+2 with v(l) <= max_vertices.
SuiteResult verify_z_formula(int max_k = 6, std::size_t max_vertices = 9);

/// Full traces on LazyHypergraph and on generate_explicit with the same coin
/// seed must coincide. Trial i uses seed derive_seed(seed, i) for both the
/// coin and the search.
SuiteResult verify_lazy_explicit(std::uint32_t n, int k, int j, double p, std::size_t trials, std::uint64_t seed);

/// PathFinder's max_l never exceeds the exact longest path (n <= 12).
SuiteResult verify_oracle_bound(std::uint32_t n, int k, int j, double p, std::size_t trials, std::uint64_t seed);

}  // namespace jtight
