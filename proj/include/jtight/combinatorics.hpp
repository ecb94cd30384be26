#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "jtight/path.hpp"

namespace jtight {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Quantities determined by (k, j) alone.
struct StructuralParams {
  int k = 0;
  int j = 0;
  int a = 0;  // 1 <= a <= k-j, a == k (mod k-j)
  int b = 0;  // k - j - a
  int s = 0;  // ceil(k/(k-j)) - 1
  int r = 0;  // s - 1; j == a + r*(k-j)
  std::uint64_t batch_size = 0;  // C(k-j, a)

  friend bool operator==(const StructuralParams&, const StructuralParams&) = default;
};

StructuralParams structural_params(int k, int j);

BigInt binomial_exact(std::uint64_t n, std::uint64_t m);
BigInt falling_factorial_exact(std::uint64_t n, std::uint64_t m);
BigInt factorial_exact(std::uint64_t n);

/// ln C(n, m); -inf when m > n.
double log_binomial(double n, double m);
/// C(n, m) in floating point (exact up to 2^53, then rounded).
double binomial_double(std::uint64_t n, std::uint64_t m);

/// p0 = 1 / (C(k-j, a) * C(n-j, k-j)).
double threshold_p0(std::uint64_t n, int k, int j);

/// Size of each edge-set equivalence class of j-tight paths of the given length.
/// Closed form when length >= s+2, brute-force enumeration below that.
BigInt z_ell(int k, int j, std::size_t length);

/// Closed form 2/b! (a!b!)^(l-s) ((k-j)!)^(2s); requires length >= s+2.
BigInt z_ell_closed_form(int k, int j, std::size_t length);

/// E(number of equivalence classes of length-l j-tight paths in H^k(n,p)),
/// i.e. (n)_v p^l / z_l, evaluated in log space. Zero when v(l) > n.
double expected_path_classes(std::uint64_t n, int k, int j, std::size_t length, double p);
/// Natural log of the above (-inf when the expectation is zero).
double log_expected_path_classes(std::uint64_t n, int k, int j, std::size_t length, double p);
/// Exact rational evaluation; intended for small n (cross-checks).
Rational expected_path_classes_exact(std::uint64_t n, int k, int j, std::size_t length,
                                     const Rational& p);

enum class Regime {
  SubcriticalLower,
  SubcriticalUpper,
  SupercriticalLower,  // j >= 2
  SupercriticalUpper,
  LooseLower,          // j == 1
};

std::string_view regime_name(Regime regime);

struct BoundCurve {
  Regime regime;
  double value;
  double n;
  int k;
  int j;
  double eps;
  double omega;
  double delta;
};

/// All bound curves of the phase-transition theorem at one parameter point.
/// The loose lower curve is included only for j == 1.
std::vector<BoundCurve> theorem_bounds(double n, int k, int j, double eps, double omega,
                                       double delta);

/// Convenience accessor; throws std::out_of_range when the regime is absent.
double bound_value(const std::vector<BoundCurve>& curves, Regime regime);

enum class PartKind { Head, Overlap, Bridge, Tail };

/// One block of the maximal same-edge-membership partition of a path.
/// Head = F_i, Overlap = A_i, Bridge = B_i, Tail = G_i (1-based index).
struct PathPart {
  PartKind kind;
  std::size_t index;
  std::vector<Vertex> vertices;
};

class ShortPathError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Splits the path into (F_1..F_s, A_1, B_1, ..., A_{l-s}, G_1..G_s) in path
/// order. Throws ShortPathError when length < s+2.
std::vector<PathPart> partition_path(const JTightPath& path);

}  // namespace jtight
