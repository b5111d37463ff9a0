#include "k3count/slag.hpp"

#include <chrono>
#include <cmath>

#include "k3count/errors.hpp"

namespace k3count {

Sublattice lagrangian_lattice(const IntegerLattice& L, const RationalVector& omega) {
  return orthogonal_complement(L, omega);
}

std::vector<double> ScaledVector::to_double() const {
  const double s = std::sqrt(scale_sq.get_d());
  std::vector<double> out;
  out.reserve(direction.size());
  for (const auto& x : direction) out.push_back(s * x.get_d());
  return out;
}

SlagForm make_slag_form(Sublattice lag, ScaledVector re_omega, ScaledVector im_omega, Rational k_omega) {
  const std::size_t n = lag.rank();
  if (re_omega.direction.size() != n || im_omega.direction.size() != n)
    throw InputError("Omega components must be given in lag coordinates");
  if (k_omega <= 0) throw InputError("K_Omega must be positive");
  if (re_omega.scale_sq <= 0 || im_omega.scale_sq <= 0) throw InputError("scale factors must be positive");
  const IntegerLattice& g = lag.induced;
  if (re_omega.scale_sq * pairing(g, re_omega.direction, re_omega.direction) != k_omega)
    throw InputError("(Re Omega)^2 differs from K_Omega");
  if (im_omega.scale_sq * pairing(g, im_omega.direction, im_omega.direction) != k_omega)
    throw InputError("(Im Omega)^2 differs from K_Omega");
  if (pairing(g, re_omega.direction, im_omega.direction) != 0) throw InputError("Re Omega . Im Omega is not zero");
  return SlagForm{std::move(lag), std::move(re_omega), std::move(im_omega), std::move(k_omega)};
}

namespace {

double normalize(const Integer& total, const Rational& R, int dimension) {
  if (R <= 0) return 0.0;
  return total.get_d() / std::pow(R.get_d(), dimension);
}

/// Sum_k weight_kl rows_k rows_l^T.
RationalMatrix pull_back(const RationalMatrix& rows, const RationalMatrix& weight) {
  const std::size_t n = rows.front().size();
  RationalMatrix out(n, RationalVector(n, Rational(0)));
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (std::size_t l = 0; l < rows.size(); ++l) {
      if (weight[k][l] == 0) continue;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i][j] += weight[k][l] * rows[k][i] * rows[l][j];
    }
  return out;
}

CountReport finish(std::string kind, const Rational& R, const RegionTally& tally, int dimension,
                   std::chrono::steady_clock::time_point t0) {
  CountReport report;
  report.kind = std::move(kind);
  report.R = R;
  report.dimension = dimension;
  report.square_nonneg = tally.square_nonneg;
  report.spherical_multiples = tally.negative;
  report.total = tally.square_nonneg + tally.negative;
  report.normalized = normalize(report.total, R, dimension);
  report.elapsed_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace

CountReport slag_count(const SlagForm& form, const Rational& R, const CountOptions& opts) {
  if (R < 0) throw InputError("R must be nonnegative");
  const auto t0 = std::chrono::steady_clock::now();
  const IntegerLattice& lag = form.lag.induced;
  const Signature sig = signature(lag);
  if (sig.plus != 2 || sig.zero != 0)
    throw InputError("Lagrangian lattice has signature " + to_string(sig) + ", need (2, n)");
  const RationalMatrix rows{pairing_row(lag, form.re_omega.direction), pairing_row(lag, form.im_omega.direction)};
  const RationalMatrix weight{{form.re_omega.scale_sq, Rational(0)}, {Rational(0), form.im_omega.scale_sq}};
  const RationalMatrix zero(2, RationalVector(2, Rational(0)));

  // Q+ = 2 F / K - G, bounded by 2 R^2 / K + 2 on the region.
  const Rational two_over = Rational(2) / form.k_omega;
  RationalMatrix q = pull_back(rows, weight);
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) q[i][j] = two_over * q[i][j] - lag.gram(i, j);

  const RegionProblem problem{lag, ExactQuadraticForm(rows, weight, zero, Rational(0)),
                              make_majorant(std::move(q), two_over, Rational(2)), -2, NegativeClasses::Literal};
  CountReport report = finish("slag", R, count_region_problem(problem, R, opts), static_cast<int>(lag.rank()), t0);
  report.analytic_C = static_cast<double>(
      coefficient_slag_general(static_cast<int>(lag.rank()), form.k_omega, discriminant(lag)).value);
  return report;
}

bool TwistorPlane::normalized() const {
  for (std::size_t i = 0; i < gram_p.size(); ++i)
    for (std::size_t j = 0; j < gram_p.size(); ++j)
      if (gram_p[i][j] != (i == j ? 1 : 0)) return false;
  return true;
}

std::vector<Eigen::VectorXd> TwistorPlane::basis_double() const {
  std::vector<Eigen::VectorXd> out;
  for (const auto& b : basis) {
    const auto d = to_double(b);
    out.emplace_back(Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size())));
  }
  return out;
}

TwistorPlane make_twistor_plane(IntegerLattice ambient, std::vector<RationalVector> basis) {
  if (basis.empty()) throw InputError("plane needs at least one vector");
  for (const auto& b : basis)
    if (b.size() != ambient.rank()) throw InputError("plane vector has the wrong length");
  const std::size_t m = basis.size();
  RationalMatrix gram(m, RationalVector(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) gram[i][j] = pairing(ambient, basis[i], basis[j]);
  if (!is_positive_definite(gram)) throw InputError("plane is not positive definite");
  RationalMatrix inv = inverse(gram);
  return TwistorPlane{std::move(ambient), std::move(basis), std::move(gram), std::move(inv)};
}

Rational twistor_seminorm_sq(const TwistorPlane& plane, const LatticeVector& gamma) {
  if (gamma.size() != plane.ambient.rank()) throw InputError("vector has the wrong length");
  const RationalVector g = to_rational(gamma);
  RationalVector b;
  for (const auto& p : plane.basis) b.push_back(pairing(plane.ambient, p, g));
  Rational out = 0;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out += b[i] * plane.gram_p_inverse[i][j] * b[j];
  return out;
}

double twistor_seminorm(const TwistorPlane& plane, const LatticeVector& gamma) {
  return std::sqrt(twistor_seminorm_sq(plane, gamma).get_d());
}

CountReport twistor_count(const TwistorPlane& plane, const Rational& R, const CountOptions& opts) {
  if (R < 0) throw InputError("R must be nonnegative");
  const auto t0 = std::chrono::steady_clock::now();
  const IntegerLattice& L = plane.ambient;
  RationalMatrix rows;
  for (const auto& p : plane.basis) rows.push_back(pairing_row(L, p));
  const std::size_t m = rows.size();
  const RationalMatrix zero(m, RationalVector(m, Rational(0)));

  RationalMatrix q = pull_back(rows, plane.gram_p_inverse);
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) q[i][j] = 2 * q[i][j] - L.gram(i, j);
  if (!is_positive_definite(q)) throw InputError("region unbounded: plane does not carry every positive direction");

  const RegionProblem problem{L, ExactQuadraticForm(rows, plane.gram_p_inverse, zero, Rational(0)),
                              make_majorant(std::move(q), Rational(2), Rational(2)), -2, NegativeClasses::Literal};
  return finish("twistor", R, count_region_problem(problem, R, opts), static_cast<int>(L.rank()), t0);
}

InvarianceReport plane_invariance_check(const TwistorPlane& plane, const IntMatrix& g,
                                        const std::vector<Rational>& R_list, const CountOptions& opts) {
  const IntegerLattice& L = plane.ambient;
  const std::size_t n = L.rank();
  if (g.size() != n) throw InputError("isometry has the wrong size");
  for (const auto& row : g)
    if (row.size() != n) throw InputError("isometry must be square");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Integer s = 0;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) s += Integer(static_cast<long>(g[a][i])) * L.gram(a, b) * g[b][j];
      if (s != L.gram(i, j)) throw InputError("matrix is not an isometry of the lattice");
    }
  std::vector<RationalVector> moved;
  for (const auto& p : plane.basis) {
    RationalVector q(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) q[i] += Rational(static_cast<long>(g[i][j])) * p[j];
    moved.push_back(std::move(q));
  }
  const TwistorPlane moved_plane = make_twistor_plane(L, std::move(moved));
  InvarianceReport out;
  for (const auto& R : R_list) {
    InvarianceRow row{R, twistor_count(plane, R, opts).total, twistor_count(moved_plane, R, opts).total};
    out.all_equal = out.all_equal && row.count_p == row.count_gp;
    out.rows.push_back(std::move(row));
  }
  return out;
}

VolumeInvarianceReport plane_invariance_check(const IntegerLattice& L, const std::vector<Eigen::VectorXd>& plane,
                                              const Eigen::MatrixXd& g, std::uint64_t samples, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(L.rank());
  if (g.rows() != n || g.cols() != n) throw InputError("isometry has the wrong size");
  const Eigen::MatrixXd gram = to_eigen(L.gram());
  const double defect = (g.transpose() * gram * g - gram).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff() * g.cwiseAbs().maxCoeff() * gram.cwiseAbs().maxCoeff());
  if (defect > 1e-12 * scale) throw InputError("matrix is not an isometry of the form");
  std::vector<Eigen::VectorXd> moved;
  for (const auto& p : plane) moved.push_back(g * p);
  VolumeInvarianceReport out;
  out.original = mc_volume(seminorm_region(L, plane), samples, seed);
  out.moved = mc_volume(seminorm_region(L, moved), samples, seed + 1);
  const double se = std::hypot(out.original.stderr_, out.moved.stderr_);
  out.z_score = se > 0 ? std::fabs(out.original.estimate - out.moved.estimate) / se : 0.0;
  out.agree = out.z_score <= 3.0;
  return out;
}

}  // namespace k3count
