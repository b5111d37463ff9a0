#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "k3count/charge.hpp"
#include "k3count/lattice.hpp"
#include "k3count/rational.hpp"

namespace k3count {

/// Exact Gamma(n/2) = coefficient * sqrt(pi)^(has_sqrt_pi ? 1 : 0).
struct GammaHalf {
  Rational coefficient;
  bool has_sqrt_pi = false;
  long double value() const;
  std::string to_string() const;
};

GammaHalf gamma_half(std::int64_t n);

/// pi^(rho/2) r^rho / Gamma(rho/2 + 1).
long double ball_volume(int rho, long double r);

struct CoefficientInputs {
  int rho = 0;
  Rational omega_sq;  // omega^2, or K_Omega for the special Lagrangian constants
  Integer disc;
  std::optional<double> scale, theta, kappa, lambda;
};

struct CoefficientResult {
  long double value = 0.0L;
  std::string formula_id;  // phase1 | scale | rotation | shear | slag | twistor_mc
  CoefficientInputs inputs;
  std::optional<long double> quadrature_error;
};

CoefficientResult coefficient_phase1(int rho, const Rational& omega_sq, const Integer& disc);

/// Leading coefficient after a GL+(2,R) twist, from the decomposition
/// g = scale * R(theta) * shear(kappa, lambda).
CoefficientResult coefficient_gl(const CoefficientResult& base, const GLPlusElement& g);
CoefficientResult coefficient_gl(const CoefficientResult& base, const GLDecomposition& d);

/// C for the charge sigma itself, twist included.
CoefficientResult coefficient_for(const StabilityCharge& sigma);

/// int_0^{2 pi} (cos^2 t + (sin t - kappa cos t)^2 / lambda^2)^(rho/2) dt.
struct QuadratureResult {
  long double value = 0.0L;
  long double error = 0.0L;
  std::size_t intervals = 0;
};
QuadratureResult shear_integral(int rho, long double kappa, long double lambda, long double tolerance = 1e-10L);

/// Same integral for even rho by binomial expansion of (m + r cos(2t - phi))^(rho/2).
long double shear_integral_even_exact(int rho, long double kappa, long double lambda);

/// Adaptive Simpson on [a, b], split into `initial` panels, stopping when the
/// summed Richardson estimates fall below tolerance or max_intervals is hit.
QuadratureResult adaptive_simpson(const std::function<long double(long double)>& f, long double a, long double b,
                                  long double tolerance, std::size_t initial = 8,
                                  std::size_t max_intervals = std::size_t{1} << 20);

/// 2 pi^(21/2) / (21 Gamma(21/2) K^(21/2) sqrt|disc|).
CoefficientResult coefficient_slag(const Rational& k_omega, const Integer& disc_lag);

/// The same constant for a Lagrangian lattice of rank n: phase-1 form with rho = n - 2.
CoefficientResult coefficient_slag_general(int rank_lag, const Rational& k_omega, const Integer& disc_lag);

/// {x in R^n : <x,x> >= 0, b(x)^T M b(x) <= 1} with b_i(x) = <p_i, x>, where
/// p_1..p_m span a positive definite m-plane and the complement is negative definite.
struct RegionSpec {
  IntegerLattice lattice;
  std::vector<Eigen::VectorXd> plane;
  Eigen::MatrixXd norm;  // m x m, positive definite
  std::string kind;      // stability | seminorm
};

/// |Z|^2 <= 1 for the charge (twist included).
RegionSpec stability_region(const StabilityCharge& sigma);
/// ||x||_P^2 <= 1 for the plane spanned by `plane`.
RegionSpec seminorm_region(const IntegerLattice& lattice, const std::vector<Eigen::VectorXd>& plane);

struct VolumeEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  double body_volume = 0.0;
};

/// Hit-or-miss estimate inside B_m(a) x B_{n-m}(a) in orthonormal coordinates.
/// Samples are drawn in fixed chunks, each from its own seeded stream, so the
/// result depends only on (region, samples, seed), never on `threads`.
VolumeEstimate mc_volume(const RegionSpec& region, std::uint64_t samples, std::uint64_t seed, unsigned threads = 1);

}  // namespace k3count
