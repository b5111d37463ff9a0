#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "k3count/analytic.hpp"
#include "k3count/counting.hpp"
#include "k3count/lattice.hpp"
#include "k3count/rational.hpp"

namespace k3count {

/// H^2 lattice classes orthogonal to omega. The signature is reported
/// separately by signature(result.induced).
Sublattice lagrangian_lattice(const IntegerLattice& L, const RationalVector& omega);

/// sqrt(scale_sq) * direction. Holomorphic forms are normalised to a fixed
/// square K, so one of Re/Im often carries an irrational factor.
struct ScaledVector {
  RationalVector direction;
  Rational scale_sq = 1;

  std::vector<double> to_double() const;
};

/// Re Omega and Im Omega in coordinates of lag.basis, with
/// (Re Omega)^2 = (Im Omega)^2 = K_Omega and Re Omega . Im Omega = 0.
struct SlagForm {
  Sublattice lag;
  ScaledVector re_omega;
  ScaledVector im_omega;
  Rational k_omega;
};

/// Validates the normalisation; throws InputError otherwise.
SlagForm make_slag_form(Sublattice lag, ScaledVector re_omega, ScaledVector im_omega, Rational k_omega);

/// #{gamma in lag, gamma != 0 : gamma^2 >= -2, (gamma.Re Omega)^2 + (gamma.Im Omega)^2 <= R^2}.
/// Refuses lattices whose signature is not (2, n).
CountReport slag_count(const SlagForm& form, const Rational& R, const CountOptions& opts = {});

/// A positive definite plane spanned by rational vectors of the ambient lattice
/// (three for a twistor plane: omega, Re Omega, Im Omega). The seminorm is the
/// length of the orthogonal projection, which depends only on the span.
struct TwistorPlane {
  IntegerLattice ambient;
  std::vector<RationalVector> basis;
  RationalMatrix gram_p;
  RationalMatrix gram_p_inverse;

  /// gram_p is the identity.
  bool normalized() const;
  std::vector<Eigen::VectorXd> basis_double() const;
};

TwistorPlane make_twistor_plane(IntegerLattice ambient, std::vector<RationalVector> basis);

/// ||gamma||_P^2 = b^T gram_p^-1 b with b_i = gamma . basis_i, exact.
Rational twistor_seminorm_sq(const TwistorPlane& plane, const LatticeVector& gamma);
double twistor_seminorm(const TwistorPlane& plane, const LatticeVector& gamma);

/// #{gamma != 0 : gamma^2 >= -2, ||gamma||_P <= R} with majorant 2 ||gamma||_P^2 - gamma^2.
CountReport twistor_count(const TwistorPlane& plane, const Rational& R, const CountOptions& opts = {});

struct InvarianceRow {
  Rational R;
  Integer count_p;
  Integer count_gp;
};

struct InvarianceReport {
  std::vector<InvarianceRow> rows;
  bool all_equal = true;
};

/// g must satisfy g^T G g = G exactly. Compares twistor counts of P and gP.
InvarianceReport plane_invariance_check(const TwistorPlane& plane, const IntMatrix& g,
                                        const std::vector<Rational>& R_list, const CountOptions& opts = {});

struct VolumeInvarianceReport {
  VolumeEstimate original;
  VolumeEstimate moved;
  double z_score = 0.0;  // |difference| / combined standard error
  bool agree = false;    // z_score <= 3
};

/// Real isometry (g^T G g = G within 1e-12 relative): compares Monte Carlo volumes
/// of {x^2 >= 0, ||x||_P <= 1} for P and gP.
VolumeInvarianceReport plane_invariance_check(const IntegerLattice& L, const std::vector<Eigen::VectorXd>& plane,
                                              const Eigen::MatrixXd& g, std::uint64_t samples, std::uint64_t seed);

}  // namespace k3count
