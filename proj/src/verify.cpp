#include "jtight/verify.hpp"

#include <sstream>

#include "jtight/combinatorics.hpp"
#include "jtight/hypergraph.hpp"
#include "jtight/oracle.hpp"
#include "jtight/run.hpp"

namespace jtight {

SuiteResult verify_z_formula(int max_k, std::size_t max_vertices) {
  SuiteResult out;
  for (int k = 2; k <= max_k; ++k) {
    for (int j = 1; j < k; ++j) {
      const StructuralParams sp = structural_params(k, j);
      for (std::size_t len = static_cast<std::size_t>(sp.s + 2); path_vertex_count(k, j, len) <= max_vertices; ++len) {
        ++out.total;
        const BigInt closed = z_ell_closed_form(k, j, len);
        const BigInt brute = z_ell_bruteforce(k, j, len);
        if (closed == brute) {
          ++out.passed;
        } else {
          std::ostringstream msg;
          msg << "k=" << k << " j=" << j << " l=" << len << ": closed form " << closed << ", brute force " << brute;
          out.failures.push_back(msg.str());
        }
      }
    }
  }
  return out;
}

SuiteResult verify_lazy_explicit(std::uint32_t n, int k, int j, double p, std::size_t trials, std::uint64_t seed) {
  SuiteResult out;
  StoppingConfig stop;
  for (std::size_t i = 0; i < trials; ++i) {
    const std::uint64_t s = derive_seed(seed, i);
    LazyHypergraph lazy(n, k, p, s, true);
    const RunTrace a = run(lazy, j, s, stop, TraceLevel::Full);
    ExplicitHypergraph explicit_h = generate_explicit(n, k, p, s);
    const RunTrace b = run(explicit_h, j, s, stop, TraceLevel::Full);
    ++out.total;
    if (a == b && lazy.repeat_queries() == 0) {
      ++out.passed;
    } else {
      out.failures.push_back("trial " + std::to_string(i) + " (seed " + std::to_string(s) + ") differs");
    }
  }
  return out;
}

SuiteResult verify_oracle_bound(std::uint32_t n, int k, int j, double p, std::size_t trials, std::uint64_t seed) {
  SuiteResult out;
  StoppingConfig stop;
  for (std::size_t i = 0; i < trials; ++i) {
    const std::uint64_t s = derive_seed(seed, i);
    ExplicitHypergraph h = generate_explicit(n, k, p, s);
    const RunTrace trace = run(h, j, s, stop);
    const LongestPathResult best = longest_path_exact(h, j);
    ++out.total;
    if (best.censored) {
      out.failures.push_back("trial " + std::to_string(i) + ": oracle censored");
    } else if (trace.summary.max_length <= best.length) {
      ++out.passed;
      if (trace.summary.max_length == best.length) ++out.equalities;
    } else {
      out.failures.push_back("trial " + std::to_string(i) + ": max_l " + std::to_string(trace.summary.max_length) +
                             " exceeds optimum " + std::to_string(best.length));
    }
  }
  return out;
}

}  // namespace jtight
