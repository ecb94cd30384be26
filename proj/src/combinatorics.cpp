#include "jtight/combinatorics.hpp"

#include <cmath>
#include <limits>

#include "jtight/oracle.hpp"

namespace jtight {
namespace {

void check_kj(int k, int j) {
  if (k < 2 || k > static_cast<int>(kMaxUniformity)) throw std::invalid_argument("need 2 <= k <= 16");
  if (j < 1 || j > k - 1) throw std::invalid_argument("need 1 <= j <= k-1");
}

double log_factorial(double x) { return std::lgamma(x + 1.0); }

double big_to_log(const BigInt& x) {
  // cpp_int -> long double conversion is exact enough for our magnitudes.
  return std::log(x.convert_to<long double>());
}

}  // namespace

StructuralParams structural_params(int k, int j) {
  check_kj(k, j);
  const int d = k - j;
  StructuralParams out;
  out.k = k;
  out.j = j;
  out.a = k % d == 0 ? d : k % d;
  out.b = d - out.a;
  out.s = (k + d - 1) / d - 1;
  out.r = out.s - 1;
  out.batch_size = binomial_exact(static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(out.a))
                       .convert_to<std::uint64_t>();
  return out;
}

BigInt binomial_exact(std::uint64_t n, std::uint64_t m) {
  if (m > n) return 0;
  if (m > n - m) m = n - m;
  BigInt acc = 1;
  for (std::uint64_t i = 1; i <= m; ++i) {
    acc *= n - m + i;
    acc /= i;
  }
  return acc;
}

BigInt falling_factorial_exact(std::uint64_t n, std::uint64_t m) {
  if (m > n) return 0;
  BigInt acc = 1;
  for (std::uint64_t i = 0; i < m; ++i) acc *= n - i;
  return acc;
}

BigInt factorial_exact(std::uint64_t n) { return falling_factorial_exact(n, n); }

double log_binomial(double n, double m) {
  if (m < 0 || m > n) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(m) - log_factorial(n - m);
}

double binomial_double(std::uint64_t n, std::uint64_t m) {
  if (m > n) return 0.0;
  if (m > n - m) m = n - m;
  long double acc = 1.0L;
  for (std::uint64_t i = 1; i <= m; ++i) acc = acc * static_cast<long double>(n - m + i) / i;
  return static_cast<double>(std::round(acc));
}

double threshold_p0(std::uint64_t n, int k, int j) {
  const StructuralParams sp = structural_params(k, j);
  if (n <= static_cast<std::uint64_t>(k)) throw std::invalid_argument("threshold_p0 needs n > k");
  const BigInt denom = binomial_exact(n - static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(k - j)) *
                       sp.batch_size;
  if (denom < BigInt(1) << 60) return 1.0 / denom.convert_to<double>();
  // huge denominators: go through logs
  const double log_denom = std::log(static_cast<double>(sp.batch_size)) +
                           log_binomial(static_cast<double>(n - j), static_cast<double>(k - j));
  return std::exp(-log_denom);
}

BigInt z_ell_closed_form(int k, int j, std::size_t length) {
  const StructuralParams sp = structural_params(k, j);
  if (length < static_cast<std::size_t>(sp.s + 2)) {
    throw std::invalid_argument("closed form for z_l needs l >= s+2");
  }
  const BigInt fa = factorial_exact(static_cast<std::uint64_t>(sp.a));
  const BigInt fb = factorial_exact(static_cast<std::uint64_t>(sp.b));
  const BigInt fd = factorial_exact(static_cast<std::uint64_t>(k - j));
  BigInt z = 2 * boost::multiprecision::pow(BigInt(fa * fb), static_cast<unsigned>(length - sp.s)) *
             boost::multiprecision::pow(fd, static_cast<unsigned>(2 * sp.s));
  return z / fb;
}

BigInt z_ell(int k, int j, std::size_t length) {
  const StructuralParams sp = structural_params(k, j);
  if (length >= static_cast<std::size_t>(sp.s + 2)) return z_ell_closed_form(k, j, length);
  return z_ell_bruteforce(k, j, length);
}

double log_expected_path_classes(std::uint64_t n, int k, int j, std::size_t length, double p) {
  const StructuralParams sp = structural_params(k, j);
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  const std::size_t v = path_vertex_count(k, j, length);
  const double neg_inf = -std::numeric_limits<double>::infinity();
  if (v > n) return neg_inf;
  if (length > 0 && p == 0.0) return neg_inf;
  const double nn = static_cast<double>(n);
  const double log_falling = log_factorial(nn) - log_factorial(nn - static_cast<double>(v));
  double log_z;
  if (length >= static_cast<std::size_t>(sp.s + 2)) {
    const double lab = log_factorial(sp.a) + log_factorial(sp.b);
    log_z = std::log(2.0) - log_factorial(sp.b) + static_cast<double>(length - sp.s) * lab +
            2.0 * sp.s * log_factorial(k - j);
  } else {
    log_z = big_to_log(z_ell_bruteforce(k, j, length));
  }
  const double log_p = length == 0 ? 0.0 : static_cast<double>(length) * std::log(p);
  return log_falling + log_p - log_z;
}

double expected_path_classes(std::uint64_t n, int k, int j, std::size_t length, double p) {
  return std::exp(log_expected_path_classes(n, k, j, length, p));
}

Rational expected_path_classes_exact(std::uint64_t n, int k, int j, std::size_t length, const Rational& p) {
  if (p < 0 || p > 1) throw std::invalid_argument("p must lie in [0, 1]");
  const std::size_t v = path_vertex_count(k, j, length);
  if (v > n) return Rational(0);
  Rational p_pow(1);
  for (std::size_t i = 0; i < length; ++i) p_pow *= p;
  return Rational(falling_factorial_exact(n, v)) * p_pow / Rational(z_ell(k, j, length));
}

std::string_view regime_name(Regime regime) {
  switch (regime) {
    case Regime::SubcriticalLower: return "subcritical_lower";
    case Regime::SubcriticalUpper: return "subcritical_upper";
    case Regime::SupercriticalLower: return "supercritical_lower";
    case Regime::SupercriticalUpper: return "supercritical_upper";
    case Regime::LooseLower: return "loose_lower";
  }
  return "unknown";
}

std::vector<BoundCurve> theorem_bounds(double n, int k, int j, double eps, double omega, double delta) {
  check_kj(k, j);
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (!(n > 1.0)) throw std::invalid_argument("n must exceed 1");
  const double log_n = std::log(n);
  const double rate = -std::log1p(-eps);
  const double d = k - j;
  auto curve = [&](Regime r, double value) { return BoundCurve{r, value, n, k, j, eps, omega, delta}; };
  std::vector<BoundCurve> out;
  out.push_back(curve(Regime::SubcriticalLower, (j * log_n - omega + 3.0 * std::log(eps)) / rate));
  out.push_back(curve(Regime::SubcriticalUpper, (j * log_n + omega) / rate));
  out.push_back(curve(Regime::SupercriticalLower, (1.0 - delta) * eps * n / (d * d)));
  out.push_back(curve(Regime::SupercriticalUpper, (1.0 + delta) * 2.0 * eps * n / (d * d)));
  if (j == 1) {
    out.push_back(curve(Regime::LooseLower, (1.0 - delta) * eps * eps * n / (4.0 * (k - 1.0) * (k - 1.0))));
  }
  return out;
}

double bound_value(const std::vector<BoundCurve>& curves, Regime regime) {
  for (const BoundCurve& c : curves) {
    if (c.regime == regime) return c.value;
  }
  throw std::out_of_range("bound curve not present");
}

std::vector<PathPart> partition_path(const JTightPath& path) {
  const StructuralParams sp = structural_params(path.k(), path.j());
  const std::size_t len = path.length();
  const std::size_t s = static_cast<std::size_t>(sp.s);
  if (len < s + 2) throw ShortPathError("partition is defined only for paths of length >= s+2");

  const std::vector<KSet> e = path.edges();
  // 1-based edge access, matching the usual e_1..e_l indexing
  auto edge = [&](std::size_t i) -> const KSet& { return e[i - 1]; };

  auto in_order = [&](const VertexSet& set) {
    std::vector<Vertex> out;
    for (Vertex v : path.vertices()) {
      if (set.contains(v)) out.push_back(v);
    }
    return out;
  };

  std::vector<PathPart> parts;
  for (std::size_t i = 1; i <= s; ++i) {
    parts.push_back({PartKind::Head, i, in_order(edge(i).minus(edge(i + 1)))});
  }
  for (std::size_t i = 1; i <= len - s; ++i) {
    parts.push_back({PartKind::Overlap, i, in_order(edge(i).intersected(edge(i + s)))});
    if (i <= len - s - 1) {
      parts.push_back({PartKind::Bridge, i, in_order(edge(i + s).minus(edge(i + s + 1)).minus(edge(i)))});
    }
  }
  for (std::size_t i = 1; i <= s; ++i) {
    parts.push_back({PartKind::Tail, i, in_order(edge(len - s + i).minus(edge(len - s + i - 1)))});
  }
  return parts;
}

}  // namespace jtight
