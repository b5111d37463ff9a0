#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "k3count/errors.hpp"
#include "k3count/slag.hpp"
#include "oracles.hpp"

using namespace k3count;

namespace {

// hyperbolic_sum(<2>) + <2> with omega = e4: Lag is the first three coordinates,
// where (r, d, s)^2 = 2 d^2 - 2 r s has signature (2, 1).
IntegerLattice surrogate_ambient() { return direct_sum({hyperbolic_sum(diagonal_lattice({2})), diagonal_lattice({2})}, ""); }

SlagForm surrogate_form() {
  Sublattice lag = lagrangian_lattice(surrogate_ambient(), to_rational(IntVector{0, 0, 0, 1}));
  const RationalVector re{Rational(1), Rational(0), ratio(-3, 2)};
  const RationalVector im{Rational(0), Rational(1), Rational(0)};
  // Re and Im are given on the ambient; move them into the basis of lag.
  return make_slag_form(lag, ScaledVector{lag.coordinates_of({re[0], re[1], re[2], Rational(0)}), 1},
                        ScaledVector{lag.coordinates_of({im[0], im[1], im[2], Rational(0)}), ratio(3, 2)}, Rational(3));
}

// F(gamma) = (gamma . Re Omega)^2 + (gamma . Im Omega)^2 is |Z|^2 of the charge with
// NS = <2>, B = 0, omega^2 = 3.
oracle::Charge surrogate_charge() { return oracle::Charge{{{2}}, {oracle::Q(0)}, {1}, oracle::Q(3, 2)}; }

IntegerLattice twistor_lattice() { return diagonal_lattice({2, 2, 2, -2, -2}); }

RationalVector unit(std::size_t n, std::size_t i, Rational scale = 1) {
  RationalVector v(n, Rational(0));
  v[i] = scale;
  return v;
}

TwistorPlane coordinate_plane() {
  return make_twistor_plane(twistor_lattice(), {unit(5, 0), unit(5, 1), unit(5, 2)});
}

oracle::Mat twistor_gram() {
  return {{2, 0, 0, 0, 0}, {0, 2, 0, 0, 0}, {0, 0, 2, 0, 0}, {0, 0, 0, -2, 0}, {0, 0, 0, 0, -2}};
}

// ||x||_P^2 = 2 (x1^2 + x2^2 + x3^2) for the coordinate plane.
std::vector<std::vector<oracle::Q>> twistor_norm() {
  std::vector<std::vector<oracle::Q>> p(5, std::vector<oracle::Q>(5, 0));
  for (int i = 0; i < 3; ++i) p[i][i] = 2;
  return p;
}

// s(x) = x - (x1 + x2 + x3 - x4) (1, 1, 1, 1, 0): the reflection in a vector of square 4.
IntMatrix reflection() {
  const IntVector v{1, 1, 1, 1, 0}, w{1, 1, 1, -1, 0};
  IntMatrix g(5, IntVector(5, 0));
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) g[i][j] = (i == j ? 1 : 0) - v[i] * w[j];
  return g;
}

}  // namespace

TEST_CASE("Lagrangian lattice examples") {
  const IntegerLattice k3 = k3_lattice();
  RationalVector omega(22, Rational(0));
  omega[0] = omega[1] = 1;
  const Sublattice lag = lagrangian_lattice(k3, omega);
  CHECK(lag.rank() == 21);
  CHECK(signature(lag.induced) == Signature{2, 19, 0});

  const IntegerLattice small = direct_sum({hyperbolic_plane(), hyperbolic_plane(), diagonal_lattice({-2})}, "");
  const Sublattice s = lagrangian_lattice(small, {Rational(1), Rational(1), Rational(0), Rational(0), Rational(0)});
  CHECK(s.rank() == 4);
  CHECK(signature(s.induced) == Signature{1, 3, 0});

  // omega isotropic: omega lies in its own complement.
  const Sublattice d = lagrangian_lattice(small, {Rational(1), Rational(0), Rational(0), Rational(0), Rational(0)});
  CHECK(d.rank() == 4);
  CHECK(signature(d.induced).zero == 1);
}

TEST_CASE("slag form validation") {
  const SlagForm f = surrogate_form();
  CHECK(f.lag.rank() == 3);
  CHECK(signature(f.lag.induced) == Signature{2, 1, 0});
  CHECK_THROWS_AS(make_slag_form(f.lag, f.re_omega, f.im_omega, Rational(2)), InputError);
  CHECK_THROWS_AS(make_slag_form(f.lag, f.re_omega, f.re_omega, Rational(3)), InputError);
  CHECK_THROWS_AS(make_slag_form(f.lag, ScaledVector{{Rational(1)}, 1}, f.im_omega, Rational(3)), InputError);
}

TEST_CASE("slag count matches the literal cube oracle") {
  const SlagForm f = surrogate_form();
  const oracle::Charge c = surrogate_charge();
  for (const auto& R : {ratio(1, 2), Rational(1), Rational(2), Rational(5)}) {
    const auto a = oracle::semistable_in_cube(c, R, 24);
    const auto b = oracle::semistable_in_cube(c, R, 28);
    REQUIRE(a.literal == b.literal);
    const CountReport slag = slag_count(f, R);
    CHECK(slag.kind == "slag");
    CHECK(slag.total == a.literal);
    // Only the multiples m delta with m >= 2 separate the two counts.
    CHECK(slag.total == a.total - a.higher_multiples);
    CHECK(slag.dimension == 3);
  }
  // Frozen from the oracle above.
  CHECK(slag_count(f, Rational(5)).total == 96);
}

TEST_CASE("slag count equals count_region on the Lagrangian lattice") {
  const SlagForm f = surrogate_form();
  const IntegerLattice& lag = f.lag.induced;
  const RationalVector r = pairing_row(lag, f.re_omega.direction);
  const RationalVector i = pairing_row(lag, f.im_omega.direction);
  RationalMatrix F(3, RationalVector(3));
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      F[a][b] = f.re_omega.scale_sq * r[a] * r[b] + f.im_omega.scale_sq * i[a] * i[b];
  for (const auto& R : {Rational(1), Rational(3), Rational(7)}) {
    const CountReport slag = slag_count(f, R);
    CHECK(slag.total == count_region(lag, F, R, -2));
    CHECK(slag.total % 2 == 0);
  }
}

TEST_CASE("slag analytic constant") {
  const CountReport r = slag_count(surrogate_form(), Rational(4));
  REQUIRE(r.analytic_C);
  CHECK(*r.analytic_C == doctest::Approx(4.0 * std::numbers::pi / (9.0 * std::sqrt(6.0))).epsilon(1e-12));
}

TEST_CASE("slag count refuses the wrong signature") {
  const IntegerLattice small = direct_sum({hyperbolic_plane(), hyperbolic_plane(), diagonal_lattice({-2})}, "");
  const Sublattice s = lagrangian_lattice(small, {Rational(1), Rational(1), Rational(0), Rational(0), Rational(0)});
  const RationalVector e(4, Rational(0));
  const SlagForm bad{s, ScaledVector{e, 1}, ScaledVector{e, 1}, Rational(1)};
  CHECK_THROWS_AS(slag_count(bad, Rational(1)), InputError);
}

TEST_CASE("slag count on the full K3 lattice needs a large budget") {
  const IntegerLattice k3 = k3_lattice();
  RationalVector omega(22, Rational(0)), re(22, Rational(0)), im(22, Rational(0));
  omega[0] = omega[1] = 1;
  re[2] = re[3] = 1;
  im[4] = im[5] = 1;
  const Sublattice lag = lagrangian_lattice(k3, omega);
  const SlagForm f =
      make_slag_form(lag, ScaledVector{lag.coordinates_of(re), 1}, ScaledVector{lag.coordinates_of(im), 1}, Rational(2));
  CountOptions opts;
  opts.point_budget = 1e7;
  CHECK_THROWS_AS(slag_count(f, Rational(3), opts), BudgetExceeded);
}

TEST_CASE("twistor seminorm examples") {
  const TwistorPlane p = coordinate_plane();
  CHECK(p.gram_p[0][0] == 2);
  CHECK_FALSE(p.normalized());
  CHECK(twistor_seminorm_sq(p, {1, 0, 0, 5, 5}) == 2);
  CHECK(twistor_seminorm_sq(p, {1, 1, 1, 0, 0}) == 6);
  CHECK(twistor_seminorm_sq(p, {0, 0, 0, 1, 1}) == 0);
  CHECK(twistor_seminorm(p, {0, 2, 0, 0, 0}) == doctest::Approx(std::sqrt(8.0)));
  // A different rational basis of the same plane gives the same seminorm.
  const TwistorPlane q = make_twistor_plane(
      twistor_lattice(), {unit(5, 0, ratio(1, 2)), {Rational(1), Rational(1), Rational(0), Rational(0), Rational(0)},
                          {Rational(0), Rational(1), Rational(1), Rational(0), Rational(0)}});
  oracle::Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    const auto v = rng.vector(5, 7);
    REQUIRE(twistor_seminorm_sq(q, v) == twistor_seminorm_sq(p, v));
  }
  CHECK_THROWS_AS(make_twistor_plane(twistor_lattice(), {unit(5, 3)}), InputError);
}

TEST_CASE("twistor count matches the cube oracle") {
  const TwistorPlane p = coordinate_plane();
  const auto gram = twistor_gram();
  const auto norm = twistor_norm();
  for (int r = 0; r <= 4; ++r) {
    const Rational R(r);
    const std::int64_t K = r + 2;
    const auto a = oracle::region_in_cube(gram, norm, R, -2, K);
    REQUIRE(a == oracle::region_in_cube(gram, norm, R, -2, K + 2));
    CHECK(twistor_count(p, R).total == a);
  }
  // At R = 0 only the -2 classes of the orthogonal complement remain: (0, 0, 0, +-1, 0) and (0, 0, 0, 0, +-1).
  CHECK(twistor_count(p, Rational(0)).total == 4);
}

TEST_CASE("twistor count is isometry invariant") {
  const TwistorPlane p = coordinate_plane();
  const std::vector<Rational> Rs{Rational(1), Rational(2), Rational(3)};
  IntMatrix identity(5, IntVector(5, 0)), flip(5, IntVector(5, 0));
  for (int i = 0; i < 5; ++i) {
    identity[i][i] = 1;
    flip[i][i] = -1;
  }
  for (const auto& g : {identity, flip, reflection()}) {
    const InvarianceReport report = plane_invariance_check(p, g, Rs);
    CHECK(report.all_equal);
    CHECK(report.rows.size() == 3);
  }
  // The reflection really moves the plane.
  const IntMatrix s = reflection();
  CHECK(s[0][0] == 0);
  IntMatrix not_iso = identity;
  not_iso[0][1] = 1;
  CHECK_THROWS_AS(plane_invariance_check(p, not_iso, Rs), InputError);
}

TEST_CASE("seminorm volume is invariant under a real isometry") {
  const IntegerLattice L = twistor_lattice();
  std::vector<Eigen::VectorXd> plane;
  for (int i = 0; i < 3; ++i) plane.push_back(Eigen::VectorXd::Unit(5, i));
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(5, 5);
  const double a = 0.8;
  g(0, 0) = g(3, 3) = std::cosh(a);
  g(0, 3) = g(3, 0) = std::sinh(a);
  const VolumeInvarianceReport r = plane_invariance_check(L, plane, g, 400000, 17);
  CHECK(r.agree);
  CHECK(r.original.hits > 0);
  g(0, 0) = 2.0;
  CHECK_THROWS_AS(plane_invariance_check(L, plane, g, 1000, 1), InputError);
}

TEST_CASE("twistor count refuses an unbounded region") {
  const TwistorPlane p = make_twistor_plane(twistor_lattice(), {unit(5, 0), unit(5, 1)});
  CHECK_THROWS_AS(twistor_count(p, Rational(1)), InputError);
}
