#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "jtight/combinatorics.hpp"
#include "jtight/oracle.hpp"
#include "test_support.hpp"

using namespace jtight;

TEST_CASE("structural params: worked examples") {
  CHECK(structural_params(5, 3) == StructuralParams{5, 3, 1, 1, 2, 1, 2});
  CHECK(structural_params(5, 2) == StructuralParams{5, 2, 2, 1, 1, 0, 3});
  CHECK(structural_params(2, 1) == StructuralParams{2, 1, 1, 0, 1, 0, 1});
}

TEST_CASE("structural params: identities for every k <= 12") {
  for (int k = 2; k <= 12; ++k) {
    for (int j = 1; j < k; ++j) {
      const StructuralParams sp = structural_params(k, j);
      const int d = k - j;
      CAPTURE(k);
      CAPTURE(j);
      CHECK(sp.a >= 1);
      CHECK(sp.a <= d);
      CHECK((k - sp.a) % d == 0);
      CHECK(sp.a + sp.b == d);
      CHECK(j == sp.a + sp.r * d);
      CHECK(sp.r >= 0);
      CHECK(sp.s == (k + d - 1) / d - 1);
      CHECK(BigInt(sp.batch_size) == binomial_exact(d, sp.a));
    }
  }
}

TEST_CASE("structural params: rejects bad j and k") {
  CHECK_THROWS_AS(structural_params(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(structural_params(3, 3), std::invalid_argument);
  CHECK_THROWS_AS(structural_params(1, 1), std::invalid_argument);
}

TEST_CASE("path vertex count") {
  CHECK(path_vertex_count(5, 3, 5) == 13);
  CHECK(path_vertex_count(5, 2, 5) == 17);
  CHECK(path_vertex_count(4, 3, 0) == 3);
}

TEST_CASE("threshold p0") {
  CHECK(threshold_p0(100, 3, 2) == doctest::Approx(1.0 / 98).epsilon(1e-15));
  CHECK(threshold_p0(100, 2, 1) == doctest::Approx(1.0 / 99).epsilon(1e-15));
  CHECK(threshold_p0(10, 3, 1) == doctest::Approx(1.0 / 72).epsilon(1e-15));
  CHECK_THROWS_AS(threshold_p0(3, 3, 1), std::invalid_argument);
  // log-space branch: C(10^6 - 2, 6) is far beyond 2^60
  const double p = threshold_p0(1'000'000, 8, 2);
  const double expect = std::exp(-(std::log(binomial_double(6, 2)) + log_binomial(999'998.0, 6.0)));
  CHECK(p == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("z_l: small examples") {
  CHECK(z_ell(2, 1, 4) == 2);
  CHECK(z_ell(3, 2, 4) == 2);
  CHECK(z_ell(3, 2, 1) == 6);
  CHECK(z_ell(2, 1, 0) == 1);
  CHECK(z_ell(4, 1, 0) == 1);
  CHECK(z_ell(4, 3, 0) == 6);
}

TEST_CASE("z_l: (k=5, j=2, l=3) agrees with enumeration") {
  // 288 was produced by the brute-force enumerator over 11! orderings.
  CHECK(z_ell_bruteforce(5, 2, 3) == 288);
  CHECK(z_ell_closed_form(5, 2, 3) == 288);
  CHECK(z_ell(5, 2, 3) == 288);
}

TEST_CASE("z_l: closed form equals brute force whenever v <= 9") {
  int compared = 0;
  for (const auto& [k, j] : jtest::small_shapes(8)) {
    const StructuralParams sp = structural_params(k, j);
    for (std::size_t len = 0; path_vertex_count(k, j, len) <= 9; ++len) {
      CAPTURE(k);
      CAPTURE(j);
      CAPTURE(len);
      const BigInt brute = z_ell_bruteforce(k, j, len);
      CHECK(z_ell(k, j, len) == brute);
      if (len >= static_cast<std::size_t>(sp.s + 2)) {
        CHECK(z_ell_closed_form(k, j, len) == brute);
        ++compared;
      }
    }
  }
  CHECK(compared > 10);
  CHECK_THROWS_AS(z_ell_closed_form(3, 2, 3), std::invalid_argument);
}

TEST_CASE("expected path classes: examples") {
  // one edge: every 3-set is a class, so the count is C(6,3) p
  CHECK(expected_path_classes(6, 3, 2, 1, 0.5) == doctest::Approx(10.0).epsilon(1e-12));
  // length 0 counts unordered j-sets
  CHECK(expected_path_classes(9, 4, 3, 0, 0.2) == doctest::Approx(84.0).epsilon(1e-12));
  CHECK(expected_path_classes(5, 3, 2, 4, 0.5) == 0.0);
  CHECK(expected_path_classes(6, 3, 2, 2, 0.0) == 0.0);
  CHECK(expected_path_classes(6, 3, 2, 0, 0.0) == doctest::Approx(15.0));
  CHECK_THROWS_AS(expected_path_classes(6, 3, 2, 1, 1.5), std::invalid_argument);
}

TEST_CASE("expected path classes: exact mode satisfies E z_l = (n)_v p^l") {
  for (const auto& [k, j] : jtest::small_shapes(4)) {
    for (std::uint64_t n = static_cast<std::uint64_t>(k); n <= 12; ++n) {
      for (std::size_t len = 0; len <= 3; ++len) {
        const Rational p(3, 7);
        const std::size_t v = path_vertex_count(k, j, len);
        const Rational e = expected_path_classes_exact(n, k, j, len, p);
        Rational pl(1);
        for (std::size_t i = 0; i < len; ++i) pl *= p;
        CAPTURE(k);
        CAPTURE(j);
        CAPTURE(n);
        CAPTURE(len);
        CHECK(e * Rational(z_ell(k, j, len)) == Rational(falling_factorial_exact(n, v)) * pl);
        if (v <= n) {
          CHECK(expected_path_classes(n, k, j, len, 3.0 / 7.0) ==
                doctest::Approx(e.convert_to<double>()).epsilon(1e-10));
        }
      }
    }
  }
}

TEST_CASE("expected path classes: monotone in p and n") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto shapes = jtest::small_shapes(5);
    const auto [k, j] = shapes[rng() % shapes.size()];
    const std::size_t len = rng() % 6;
    const std::uint64_t n = static_cast<std::uint64_t>(k) + rng() % 40;
    double p1 = unit(rng), p2 = unit(rng);
    if (p1 > p2) std::swap(p1, p2);
    CHECK(expected_path_classes(n, k, j, len, p1) <= expected_path_classes(n, k, j, len, p2) * (1 + 1e-12));
    CHECK(expected_path_classes(n, k, j, len, p1) <= expected_path_classes(n + 1, k, j, len, p1) * (1 + 1e-12));
  }
}

TEST_CASE("theorem bounds: examples") {
  // -ln(1 - eps) = 1
  const double eps = 1.0 - std::exp(-1.0);
  const auto sub = theorem_bounds(std::exp(10.0), 3, 2, eps, 2.0, 0.5);
  CHECK(bound_value(sub, Regime::SubcriticalUpper) == doctest::Approx(22.0));
  CHECK(bound_value(sub, Regime::SubcriticalLower) == doctest::Approx(20.0 - 2.0 + 3.0 * std::log(eps)));
  CHECK(sub.size() == 4);

  const auto sup = theorem_bounds(1e4, 3, 2, 0.2, 1.0, 0.5);
  CHECK(bound_value(sup, Regime::SupercriticalLower) == doctest::Approx(1000.0));
  CHECK(bound_value(sup, Regime::SupercriticalUpper) == doctest::Approx(6000.0));
  CHECK_THROWS_AS(bound_value(sup, Regime::LooseLower), std::out_of_range);

  const auto loose = theorem_bounds(2000, 3, 1, 0.4, 1.0, 0.5);
  CHECK(loose.size() == 5);
  CHECK(bound_value(loose, Regime::LooseLower) == doctest::Approx(10.0));

  const auto ac9 = theorem_bounds(2000, 3, 2, 0.3, 6.0, 0.5);
  CHECK(bound_value(ac9, Regime::SubcriticalLower) == doctest::Approx(15.7).epsilon(0.01));
  CHECK(bound_value(ac9, Regime::SubcriticalUpper) == doctest::Approx(59.4).epsilon(0.01));
}

TEST_CASE("theorem bounds: argument checks and ordering") {
  CHECK_THROWS_AS(theorem_bounds(100, 3, 2, 0.0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(theorem_bounds(100, 3, 2, 1.0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(theorem_bounds(100, 3, 2, 0.5, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(theorem_bounds(100, 3, 2, 0.5, 1.0, 0.0), std::invalid_argument);
  for (double n : {50.0, 1e3, 1e5}) {
    for (double eps : {0.05, 0.3, 0.9}) {
      const auto c = theorem_bounds(n, 4, 2, eps, 3.0, 0.4);
      CHECK(bound_value(c, Regime::SubcriticalLower) <= bound_value(c, Regime::SubcriticalUpper));
      CHECK(bound_value(c, Regime::SupercriticalLower) <= bound_value(c, Regime::SupercriticalUpper));
    }
  }
}

namespace {

std::vector<std::size_t> part_sizes(const std::vector<PathPart>& parts) {
  std::vector<std::size_t> out;
  for (const PathPart& p : parts) out.push_back(p.vertices.size());
  return out;
}

}  // namespace

TEST_CASE("partition: k=5, j=2, length 5") {
  std::vector<Vertex> seq(17);
  std::iota(seq.begin(), seq.end(), Vertex{1});
  const auto parts = partition_path(JTightPath(5, 2, seq));
  CHECK(part_sizes(parts) == std::vector<std::size_t>{3, 2, 1, 2, 1, 2, 1, 2, 3});
  CHECK(parts.front().kind == PartKind::Head);
  CHECK(parts.back().kind == PartKind::Tail);
}

TEST_CASE("partition: graph path") {
  const auto parts = partition_path(JTightPath(2, 1, {10, 11, 12, 13}));
  REQUIRE(parts.size() == 5);
  CHECK(parts[0].vertices == std::vector<Vertex>{10});
  CHECK(parts[1].vertices == std::vector<Vertex>{11});
  CHECK(parts[2].vertices.empty());
  CHECK(parts[3].vertices == std::vector<Vertex>{12});
  CHECK(parts[4].vertices == std::vector<Vertex>{13});
}

TEST_CASE("partition: tight 3-path of length 4") {
  const auto parts = partition_path(JTightPath(3, 2, {4, 0, 5, 1, 3, 2}));
  // F1 F2 A1 B1 A2 G1 G2
  CHECK(part_sizes(parts) == std::vector<std::size_t>{1, 1, 1, 0, 1, 1, 1});
  CHECK(parts[2].vertices == std::vector<Vertex>{5});
  CHECK(parts[4].vertices == std::vector<Vertex>{1});
  CHECK(parts[6].vertices == std::vector<Vertex>{2});
}

TEST_CASE("partition: short paths are rejected") {
  CHECK_THROWS_AS(partition_path(JTightPath(3, 2, {0, 1, 2, 3, 4})), ShortPathError);
  CHECK_THROWS_AS(partition_path(JTightPath(5, 2, {0, 1, 2, 3, 4, 5, 6, 7})), ShortPathError);
}

TEST_CASE("partition: parts tile the path and permuting inside parts keeps the edges") {
  std::mt19937_64 rng(4);
  for (const auto& [k, j] : jtest::small_shapes(6)) {
    const StructuralParams sp = structural_params(k, j);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t len = static_cast<std::size_t>(sp.s + 2) + rng() % 4;
      const JTightPath path = jtest::random_path(k, j, len, 200, rng);
      const auto parts = partition_path(path);
      std::vector<Vertex> concat;
      std::vector<Vertex> shuffled;
      for (const PathPart& p : parts) {
        concat.insert(concat.end(), p.vertices.begin(), p.vertices.end());
        std::vector<Vertex> q = p.vertices;
        std::shuffle(q.begin(), q.end(), rng);
        shuffled.insert(shuffled.end(), q.begin(), q.end());
      }
      CAPTURE(k);
      CAPTURE(j);
      CHECK(concat == path.vertices());
      auto e1 = path.edges();
      auto e2 = JTightPath(k, j, shuffled).edges();
      std::sort(e1.begin(), e1.end());
      std::sort(e2.begin(), e2.end());
      CHECK(e1 == e2);
    }
  }
}
