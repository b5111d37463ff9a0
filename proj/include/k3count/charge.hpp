#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "k3count/lattice.hpp"
#include "k3count/rational.hpp"

namespace k3count {

/// (r, D, s) in H^0 + NS + H^4.
struct MukaiVector {
  std::int64_t r = 0;
  LatticeVector D;
  std::int64_t s = 0;

  LatticeVector coords() const;
  static MukaiVector from_coords(const LatticeVector& coords);
  std::string to_string() const;  // "(r,D1,..,s)"

  friend bool operator==(const MukaiVector&, const MukaiVector&) = default;
};

/// v(E) = (rk E, c1(E), chi(E) - rk E).
MukaiVector mukai_vector(std::int64_t rank, LatticeVector c1, std::int64_t euler_characteristic);

using Matrix2Q = std::array<std::array<Rational, 2>, 2>;

/// Element of GL+(2,R) acting on central charges from the right:
/// (Re Z', Im Z') = (Re Z, Im Z) * g. The shear [[1, k], [0, l]] thus gives
/// Z' = Re Z + i (k Re Z + l Im Z).
///
/// Entries are exact rationals. Real rotations are stored with the dyadic
/// values of cos/sin plus an exact conformal factor, so |Z'| = |Z| is used
/// for region membership.
class GLPlusElement {
 public:
  GLPlusElement();
  explicit GLPlusElement(Matrix2Q m, std::optional<Rational> conformal_scale_sq = std::nullopt);

  static GLPlusElement identity() { return GLPlusElement(); }
  static GLPlusElement scale(const Rational& c);
  static GLPlusElement rotation(double theta);
  /// Exact rotation; requires cos^2 + sin^2 = 1.
  static GLPlusElement rotation(const Rational& cos_t, const Rational& sin_t);
  static GLPlusElement shear(const Rational& kappa, const Rational& lambda);
  static GLPlusElement from_matrix(const Eigen::Matrix2d& m);

  const Rational& at(int i, int j) const { return m_[i][j]; }
  const Matrix2Q& matrix() const { return m_; }
  Rational det() const;
  Eigen::Matrix2d to_eigen() const;
  bool is_identity() const;

  /// g then h: Z * g * h.
  GLPlusElement then(const GLPlusElement& h) const;

  /// When set, |Z * g|^2 = conformal_scale_sq * |Z|^2 exactly.
  const std::optional<Rational>& conformal_scale_sq() const { return conformal_; }

  /// M = g g^T, so |Z * g|^2 = Z M Z^T.
  Matrix2Q norm_matrix() const;

 private:
  Matrix2Q m_;
  std::optional<Rational> conformal_;
};

/// g = scale * R(theta) * [[1, kappa], [0, lambda]], R(theta) = [[c, -s], [s, c]].
struct GLDecomposition {
  double scale = 1.0;
  double theta = 0.0;  // in [0, 2 pi)
  double kappa = 0.0;
  double lambda = 1.0;
};

GLDecomposition decompose_gl(const Eigen::Matrix2d& g);
GLDecomposition decompose_gl(const GLPlusElement& g);
Eigen::Matrix2d recompose_gl(const GLDecomposition& d);

/// Central charge Z(v) = <Re phi, v> + i <Im phi, v> of the phase-1 geometric
/// stability condition phi = exp(B + i omega), optionally twisted by GL+(2,R).
/// omega = t h with h integral and t^2 rational, which keeps |Z|^2 rational.
class StabilityCharge {
 public:
  StabilityCharge(IntegerLattice ns, RationalVector B, LatticeVector omega_ray, Rational t_sq,
                  GLPlusElement twist = GLPlusElement());

  const IntegerLattice& ns() const { return ns_; }
  const IntegerLattice& mukai() const { return mukai_; }
  std::size_t rho() const { return ns_.rank(); }
  const RationalVector& B() const { return b_; }
  const LatticeVector& omega_ray() const { return h_; }
  const Rational& t_sq() const { return t_sq_; }
  const GLPlusElement& twist() const { return twist_; }
  bool is_twisted() const { return !twist_.is_identity(); }
  StabilityCharge untwisted() const;

  Rational omega_sq() const { return omega_sq_; }
  Rational b_sq() const;
  Rational b_dot_h() const;

  /// (1, B, (B^2 - omega^2) / 2).
  const RationalVector& re_phi() const { return re_phi_; }
  /// (0, h, B.h); Im phi = t * im_phi_direction().
  const RationalVector& im_phi_direction() const { return im_dir_; }
  std::vector<double> im_phi() const;

 private:
  IntegerLattice ns_;
  IntegerLattice mukai_;
  RationalVector b_;
  LatticeVector h_;
  Rational t_sq_;
  GLPlusElement twist_;
  Rational omega_sq_;
  RationalVector re_phi_;
  RationalVector im_dir_;
};

/// All parts are exact: values of the form a + b sqrt(t^2).
struct CentralChargeValue {
  Rational re_untwisted;  // <Re phi, v>
  Rational im_over_t;     // <Im phi, v> / t
  Surd re;
  Surd im;
  Surd abs_sq;
};

CentralChargeValue central_charge(const StabilityCharge& sigma, const LatticeVector& v);
CentralChargeValue central_charge(const StabilityCharge& sigma, const MukaiVector& v);

StabilityCharge apply_gl(const StabilityCharge& sigma, const GLPlusElement& g);

struct WallWitness {
  MukaiVector delta;
  Surd abs_sq;
  bool vanishing = false;  // Z(delta) = 0; otherwise Z(delta) is real negative with r > 0
};

/// Bounded search for spherical classes (delta^2 = -2) with |Z(delta)| <= bound
/// that violate phase-1 membership. An empty result certifies nothing beyond
/// the bound. The twist is ignored: walls are properties of the untwisted form.
std::vector<WallWitness> genericity_check(const StabilityCharge& sigma, const Rational& search_bound);

struct SystoleResult {
  Surd abs_sq;
  double value = 0.0;
  MukaiVector witness;
};

/// min |Z(v)| over nonzero v with primitive part v0^2 >= -2 and |Z(v)| <= R.
std::optional<SystoleResult> systole_estimate(const StabilityCharge& sigma, const Rational& R);

}  // namespace k3count
