#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "k3count/errors.hpp"
#include "k3count/lattice.hpp"
#include "oracles.hpp"

using namespace k3count;

namespace {

IntMatrix random_unimodular(oracle::Rng& rng, std::size_t n) {
  IntMatrix u(n, IntVector(n, 0));
  for (std::size_t i = 0; i < n; ++i) u[i][i] = 1;
  for (int step = 0; step < 12; ++step) {
    const auto i = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(n) - 1));
    const auto j = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(n) - 1));
    if (i == j) continue;
    const std::int64_t k = rng.uniform(-1, 1);
    for (std::size_t r = 0; r < n; ++r) u[r][j] += k * u[r][i];  // column j += k column i
  }
  return u;
}

IntMatrix congruent(const IntMatrix& g, const IntMatrix& u) {
  const std::size_t n = g.size();
  IntMatrix out(n, IntVector(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) out[i][j] += u[a][i] * g[a][b] * u[b][j];
  return out;
}

}  // namespace

TEST_CASE("pairing examples") {
  const IntegerLattice u = hyperbolic_plane();
  CHECK(pairing(u, LatticeVector{1, 0}, LatticeVector{0, 1}) == 1);
  CHECK(pairing(u, LatticeVector{1, 0}, LatticeVector{1, 0}) == 0);
  const IntegerLattice k3 = k3_lattice();
  CHECK(pairing(k3, LatticeVector(22, 0), LatticeVector(22, 3)) == 0);
  const IntegerLattice mukai = hyperbolic_sum(diagonal_lattice({2}));
  CHECK(pairing(mukai, LatticeVector{1, 0, 1}, LatticeVector{1, 0, 1}) == -2);
  CHECK_THROWS_AS(pairing(u, LatticeVector{1, 0, 0}, LatticeVector{1, 0}), InputError);
}

TEST_CASE("signature examples") {
  CHECK(signature(k3_lattice()) == Signature{3, 19, 0});
  CHECK(signature(mukai_lattice()) == Signature{4, 20, 0});
  CHECK(signature(IntegerLattice({{0}}, "zero")) == Signature{0, 0, 1});
  CHECK(signature(hyperbolic_sum(diagonal_lattice({2}))) == Signature{2, 1, 0});
  CHECK(signature(IntegerLattice({{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}, "")) == Signature{1, 1, 1});
}

TEST_CASE("discriminant examples") {
  CHECK(discriminant(hyperbolic_plane()) == -1);
  CHECK(discriminant(diagonal_lattice({2})) == 2);
  CHECK(discriminant(k3_lattice()) == -1);
  CHECK(discriminant(negative_e8()) == 1);
  CHECK(discriminant(mukai_lattice()) == 1);
  CHECK(discriminant(IntegerLattice({{0}}, "")) == 0);
}

TEST_CASE("standard lattices") {
  CHECK(standard_lattice("K3").rank() == 22);
  CHECK(standard_lattice("Mukai").rank() == 24);
  CHECK(standard_lattice("U") == hyperbolic_plane());
  CHECK(standard_lattice("E8_negative").is_even());
  CHECK(k3_lattice().is_even());
  CHECK_THROWS_AS(standard_lattice("E7"), InputError);
  CHECK_THROWS_AS(hyperbolic_sum(IntegerLattice({{0}}, "")), InputError);
  CHECK_THROWS_AS(IntegerLattice({{1, 2}, {3, 1}}, "asym"), InputError);
  // hyperbolic_sum coordinates are (r, D, s) with <v,v> = D^2 - 2 r s.
  const IntegerLattice h = hyperbolic_sum(diagonal_lattice({2, -2}));
  CHECK(pairing(h, LatticeVector{1, 1, 1, 2}, LatticeVector{1, 1, 1, 2}) == 2 - 2 - 4);
}

TEST_CASE("negative E8 is the negated Cartan matrix") {
  const IntegerLattice e8 = negative_e8();
  int edges = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(e8.gram(i, i) == -2);
    for (std::size_t j = i + 1; j < 8; ++j) edges += e8.gram(i, j) != 0;
  }
  CHECK(edges == 7);
  CHECK(signature(e8) == Signature{0, 8, 0});
}

TEST_CASE("orthogonal complement examples") {
  const Sublattice a = orthogonal_complement(hyperbolic_plane(), {Rational(1), Rational(0)});
  REQUIRE(a.rank() == 1);
  CHECK(a.basis[0] == LatticeVector{1, 0});
  CHECK(a.induced.gram(0, 0) == 0);

  const Sublattice b = orthogonal_complement(diagonal_lattice({2, -2}), {Rational(1), Rational(1)});
  REQUIRE(b.rank() == 1);
  CHECK(b.basis[0] == LatticeVector{1, 1});

  const Sublattice c = orthogonal_complement(IntegerLattice({{0, 0}, {0, 2}}, ""), {Rational(1), Rational(0)});
  CHECK(c.rank() == 2);
  CHECK(c.degenerate_direction);

  CHECK_THROWS_AS(orthogonal_complement(hyperbolic_plane(), {Rational(0), Rational(0)}), InputError);

  // Rational direction: (1/2, 1/3) in <2> + <2> pairs as x + 2y/3, so the kernel is (2, -3).
  const Sublattice d = orthogonal_complement(diagonal_lattice({2, 2}), {ratio(1, 2), ratio(1, 3)});
  REQUIRE(d.rank() == 1);
  CHECK(d.basis[0] == LatticeVector{2, -3});
}

TEST_CASE("primitive decomposition examples") {
  auto p = primitive_decompose({2, 4, 6});
  CHECK(p.multiplicity == 2);
  CHECK(p.primitive == LatticeVector{1, 2, 3});
  p = primitive_decompose({1, 0, 1});
  CHECK(p.multiplicity == 1);
  p = primitive_decompose({-3, 0, 3});
  CHECK(p.multiplicity == 3);
  CHECK(p.primitive == LatticeVector{-1, 0, 1});
  CHECK_THROWS_AS(primitive_decompose({0, 0}), InputError);
}

TEST_CASE("orthobasis extension for the running example") {
  // NS = <2>, B = 0, omega = t h with t^2 = 3/2: Re phi = (1, 0, -3/2), Im phi = t (0, 1, 0).
  const IntegerLattice mukai = hyperbolic_sum(diagonal_lattice({2}));
  const double t = std::sqrt(1.5);
  Eigen::VectorXd re(3), im(3);
  re << 1.0, 0.0, -1.5;
  im << 0.0, t, 0.0;
  const OrthobasisExtension ext = orthobasis_extension(mukai, {re, im});
  CHECK(std::fabs(ext.det_A) == doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(ext.det_A * ext.det_A * 2.0 == doctest::Approx(9.0).epsilon(1e-9));
  const Eigen::MatrixXd g = to_eigen(mukai.gram());
  REQUIRE(ext.w_basis.size() == 1);
  CHECK(std::fabs(ext.w_basis[0].dot(g * ext.w_basis[0]) + 1.0) < 1e-12);
  CHECK(std::fabs(ext.w_basis[0].dot(g * re)) < 1e-12);

  // Rational overload: Im phi passed without its factor t.
  const OrthobasisExtension ext2 =
      orthobasis_extension(mukai, RationalVector{Rational(1), Rational(0), ratio(-3, 2)},
                           RationalVector{Rational(0), Rational(1), Rational(0)});
  CHECK(ext2.w_basis.size() == 1);

  Eigen::VectorXd bad(3);
  bad << 1.0, 0.0, 0.0;  // null vector
  CHECK_THROWS_AS(orthobasis_extension(mukai, {bad}), InputError);
}

TEST_CASE("property: pairing is symmetric") {
  oracle::Rng rng(11);
  for (const IntegerLattice& L : {k3_lattice(), mukai_lattice(), hyperbolic_sum(diagonal_lattice({2, -4}))}) {
    for (int i = 0; i < 1000; ++i) {
      const auto u = rng.vector(L.rank(), 20);
      const auto v = rng.vector(L.rank(), 20);
      REQUIRE(pairing(L, u, v) == pairing(L, v, u));
    }
  }
}

TEST_CASE("property: signature and discriminant under unimodular change of basis") {
  oracle::Rng rng(12);
  const std::vector<IntegerLattice> lattices{k3_lattice(), hyperbolic_sum(diagonal_lattice({2, -2})),
                                             diagonal_lattice({2, 2, 2, -2, -2}), negative_e8()};
  for (const auto& L : lattices) {
    for (int trial = 0; trial < 10; ++trial) {
      const IntMatrix u = random_unimodular(rng, L.rank());
      const IntegerLattice M(congruent(L.gram(), u), "changed");
      CHECK(signature(M) == signature(L));
      CHECK(discriminant(M) == discriminant(L));
    }
  }
}

TEST_CASE("property: orthogonal complement is saturated") {
  oracle::Rng rng(13);
  const IntegerLattice L = hyperbolic_sum(diagonal_lattice({2, -6}));
  const RationalVector w{Rational(1), ratio(2, 3), Rational(-1), Rational(5)};
  const Sublattice S = orthogonal_complement(L, w);
  REQUIRE(S.rank() == 3);
  // Integer functional proportional to x -> (x, w).
  const RationalVector f = pairing_row(L, w);
  IntVector fi;
  for (const auto& x : f) fi.push_back(Rational(x * 3).get_num().get_si());
  int checked = 0;
  while (checked < 1000) {
    const auto x = rng.vector(4, 9);
    const auto y = rng.vector(4, 9);
    std::int64_t fx = 0, fy = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      fx += fi[i] * x[i];
      fy += fi[i] * y[i];
    }
    LatticeVector v(4);
    for (std::size_t i = 0; i < 4; ++i) v[i] = fy * x[i] - fx * y[i];
    // Divide out the content so the test also probes saturation.
    const std::int64_t c = oracle::content(v);
    if (c == 0) continue;
    for (auto& e : v) e /= c;
    REQUIRE(pairing(L, to_rational(v), w) == 0);
    const RationalVector coords = S.coordinates_of(to_rational(v));
    for (const auto& q : coords) REQUIRE(q.get_den() == 1);
    ++checked;
  }
  for (std::size_t i = 0; i < S.rank(); ++i)
    for (std::size_t j = 0; j < S.rank(); ++j) CHECK(S.induced.gram(i, j) == pairing(L, S.basis[i], S.basis[j]));
}

TEST_CASE("property: primitive decomposition round trip") {
  oracle::Rng rng(14);
  for (int i = 0; i < 1000; ++i) {
    auto v = rng.vector(5, 30);
    const std::int64_t k = rng.uniform(1, 6);
    for (auto& x : v) x *= k;
    if (oracle::content(v) == 0) continue;
    const auto p = primitive_decompose(v);
    REQUIRE(p.multiplicity > 0);
    REQUIRE(oracle::content(p.primitive) == 1);
    for (std::size_t j = 0; j < v.size(); ++j) REQUIRE(p.multiplicity * p.primitive[j] == v[j]);
  }
}

TEST_CASE("exact rational helpers") {
  CHECK(parse_rational("3/6") == ratio(1, 2));
  CHECK(parse_rational("-7") == -7);
  CHECK_THROWS_AS(parse_rational("1/0"), InputError);
  CHECK_THROWS_AS(parse_rational("x"), InputError);
  CHECK(to_string(ratio(-3, 9)) == "-1/3");
  CHECK(floor_sqrt(ratio(17, 1)) == 4);
  CHECK(floor_sqrt(ratio(1, 4)) == 0);
  CHECK(sqrt_upper(Rational(2)) * sqrt_upper(Rational(2)) >= 2);
  CHECK(surd_sign(Rational(-3), Rational(2), Rational(2)) == -1);  // -3 + 2 sqrt 2 < 0
  CHECK(surd_sign(Rational(3), Rational(-2), Rational(2)) == 1);
  CHECK(surd_sign(Rational(-2), Rational(1), Rational(4)) == 0);
  CHECK(Surd(Rational(1), Rational(1), Rational(2)) < Surd(ratio(5, 2)));
  CHECK(rational_from_double(0.375) == ratio(3, 8));
}
