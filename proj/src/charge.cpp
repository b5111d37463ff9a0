#include "k3count/charge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "k3count/counting.hpp"
#include "k3count/errors.hpp"
#include "k3count/majorant.hpp"

namespace k3count {

LatticeVector MukaiVector::coords() const {
  LatticeVector out;
  out.reserve(D.size() + 2);
  out.push_back(r);
  out.insert(out.end(), D.begin(), D.end());
  out.push_back(s);
  return out;
}

MukaiVector MukaiVector::from_coords(const LatticeVector& coords) {
  if (coords.size() < 2) throw InputError("Mukai vector needs at least (r, s)");
  return MukaiVector{coords.front(), LatticeVector(coords.begin() + 1, coords.end() - 1), coords.back()};
}

std::string MukaiVector::to_string() const {
  std::string out = "(" + std::to_string(r);
  for (auto d : D) out += "," + std::to_string(d);
  out += "," + std::to_string(s) + ")";
  return out;
}

MukaiVector mukai_vector(std::int64_t rank, LatticeVector c1, std::int64_t euler_characteristic) {
  return MukaiVector{rank, std::move(c1), euler_characteristic - rank};
}

namespace {

Matrix2Q multiply(const Matrix2Q& a, const Matrix2Q& b) {
  Matrix2Q out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return out;
}

std::optional<Rational> detect_conformal(const Matrix2Q& m) {
  if (m[0][0] == m[1][1] && m[0][1] == -m[1][0]) return Rational(m[0][0] * m[0][0] + m[0][1] * m[0][1]);
  return std::nullopt;
}

}  // namespace

GLPlusElement::GLPlusElement() : GLPlusElement(Matrix2Q{{{Rational(1), Rational(0)}, {Rational(0), Rational(1)}}}) {}

GLPlusElement::GLPlusElement(Matrix2Q m, std::optional<Rational> conformal_scale_sq) : m_(std::move(m)) {
  if (det() <= 0) throw InputError("GL+(2,R) element needs a positive determinant");
  conformal_ = conformal_scale_sq ? conformal_scale_sq : detect_conformal(m_);
  if (conformal_ && *conformal_ <= 0) throw InputError("conformal factor must be positive");
}

GLPlusElement GLPlusElement::scale(const Rational& c) {
  if (c <= 0) throw InputError("scale factor must be positive");
  return GLPlusElement(Matrix2Q{{{c, Rational(0)}, {Rational(0), c}}});
}

GLPlusElement GLPlusElement::rotation(double theta) {
  const Rational c = rational_from_double(std::cos(theta));
  const Rational s = rational_from_double(std::sin(theta));
  return GLPlusElement(Matrix2Q{{{c, Rational(-s)}, {s, c}}}, Rational(1));
}

GLPlusElement GLPlusElement::rotation(const Rational& cos_t, const Rational& sin_t) {
  if (cos_t * cos_t + sin_t * sin_t != 1) throw InputError("exact rotation needs cos^2 + sin^2 = 1");
  return GLPlusElement(Matrix2Q{{{cos_t, Rational(-sin_t)}, {sin_t, cos_t}}});
}

GLPlusElement GLPlusElement::shear(const Rational& kappa, const Rational& lambda) {
  if (lambda <= 0) throw InputError("shear needs lambda > 0");
  return GLPlusElement(Matrix2Q{{{Rational(1), kappa}, {Rational(0), lambda}}});
}

GLPlusElement GLPlusElement::from_matrix(const Eigen::Matrix2d& m) {
  Matrix2Q q;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) q[i][j] = rational_from_double(m(i, j));
  return GLPlusElement(q);
}

Rational GLPlusElement::det() const { return m_[0][0] * m_[1][1] - m_[0][1] * m_[1][0]; }

Eigen::Matrix2d GLPlusElement::to_eigen() const {
  Eigen::Matrix2d out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out(i, j) = m_[i][j].get_d();
  return out;
}

bool GLPlusElement::is_identity() const { return m_[0][0] == 1 && m_[0][1] == 0 && m_[1][0] == 0 && m_[1][1] == 1; }

GLPlusElement GLPlusElement::then(const GLPlusElement& h) const {
  std::optional<Rational> conformal;
  if (conformal_ && h.conformal_) conformal = *conformal_ * *h.conformal_;
  return GLPlusElement(multiply(m_, h.m_), conformal);
}

Matrix2Q GLPlusElement::norm_matrix() const {
  if (conformal_) return Matrix2Q{{{*conformal_, Rational(0)}, {Rational(0), *conformal_}}};
  Matrix2Q out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out[i][j] = m_[i][0] * m_[j][0] + m_[i][1] * m_[j][1];
  return out;
}

GLDecomposition decompose_gl(const Eigen::Matrix2d& g) {
  const double det = g.determinant();
  if (!(det > 0.0)) throw InputError("decompose_gl needs a positive determinant");
  // QR with positive diagonal: g = Q [[r11, r12], [0, r22]].
  const double r11 = std::hypot(g(0, 0), g(1, 0));
  const double c = g(0, 0) / r11;
  const double s = g(1, 0) / r11;
  const double r12 = c * g(0, 1) + s * g(1, 1);
  const double r22 = det / r11;
  GLDecomposition out;
  out.scale = r11;
  out.theta = std::atan2(s, c);
  if (out.theta < 0.0) out.theta += 2.0 * std::numbers::pi;
  if (out.theta >= 2.0 * std::numbers::pi) out.theta = 0.0;
  out.kappa = r12 / r11;
  out.lambda = r22 / r11;
  return out;
}

GLDecomposition decompose_gl(const GLPlusElement& g) { return decompose_gl(g.to_eigen()); }

Eigen::Matrix2d recompose_gl(const GLDecomposition& d) {
  Eigen::Matrix2d rot;
  rot << std::cos(d.theta), -std::sin(d.theta), std::sin(d.theta), std::cos(d.theta);
  Eigen::Matrix2d shear;
  shear << 1.0, d.kappa, 0.0, d.lambda;
  return d.scale * rot * shear;
}

StabilityCharge::StabilityCharge(IntegerLattice ns, RationalVector B, LatticeVector omega_ray, Rational t_sq,
                                 GLPlusElement twist)
    : ns_(std::move(ns)), b_(std::move(B)), h_(std::move(omega_ray)), t_sq_(std::move(t_sq)), twist_(std::move(twist)) {
  const std::size_t rho = ns_.rank();
  if (b_.size() != rho) throw InputError("B must have length rho");
  if (h_.size() != rho) throw InputError("omega_ray must have length rho");
  if (t_sq_ <= 0) throw InputError("t_sq must be positive");
  mukai_ = hyperbolic_sum(ns_);
  omega_sq_ = t_sq_ * Rational(square(ns_, h_));
  if (omega_sq_ <= 0) throw InputError("omega^2 must be positive");

  re_phi_.assign(rho + 2, Rational(0));
  im_dir_.assign(rho + 2, Rational(0));
  re_phi_[0] = 1;
  for (std::size_t i = 0; i < rho; ++i) {
    re_phi_[i + 1] = b_[i];
    im_dir_[i + 1] = static_cast<long>(h_[i]);
  }
  re_phi_[rho + 1] = (b_sq() - omega_sq_) / 2;
  im_dir_[rho + 1] = b_dot_h();
}

StabilityCharge StabilityCharge::untwisted() const { return StabilityCharge(ns_, b_, h_, t_sq_); }

Rational StabilityCharge::b_sq() const { return pairing(ns_, b_, b_); }

Rational StabilityCharge::b_dot_h() const { return pairing(ns_, b_, to_rational(h_)); }

std::vector<double> StabilityCharge::im_phi() const {
  const double t = std::sqrt(t_sq_.get_d());
  std::vector<double> out;
  out.reserve(im_dir_.size());
  for (const auto& x : im_dir_) out.push_back(t * x.get_d());
  return out;
}

CentralChargeValue central_charge(const StabilityCharge& sigma, const LatticeVector& v) {
  const RationalVector vq = to_rational(v);
  CentralChargeValue out;
  out.re_untwisted = pairing(sigma.mukai(), sigma.re_phi(), vq);
  out.im_over_t = pairing(sigma.mukai(), sigma.im_phi_direction(), vq);
  const auto& g = sigma.twist();
  const Rational& a = out.re_untwisted;
  const Rational& b = out.im_over_t;
  const Rational& d = sigma.t_sq();
  out.re = Surd(a * g.at(0, 0), b * g.at(1, 0), d);
  out.im = Surd(a * g.at(0, 1), b * g.at(1, 1), d);
  const Matrix2Q m = g.norm_matrix();
  out.abs_sq = Surd(m[0][0] * a * a + m[1][1] * d * b * b, 2 * m[0][1] * a * b, d);
  return out;
}

CentralChargeValue central_charge(const StabilityCharge& sigma, const MukaiVector& v) {
  if (v.D.size() != sigma.rho()) throw InputError("Mukai vector D has the wrong length");
  return central_charge(sigma, v.coords());
}

StabilityCharge apply_gl(const StabilityCharge& sigma, const GLPlusElement& g) {
  return StabilityCharge(sigma.ns(), sigma.B(), sigma.omega_ray(), sigma.t_sq(), sigma.twist().then(g));
}

namespace {

bool canonical_orientation(const LatticeVector& v) {
  for (auto x : v) {
    if (x != 0) return x > 0;
  }
  return false;
}

}  // namespace

std::vector<WallWitness> genericity_check(const StabilityCharge& sigma, const Rational& search_bound) {
  std::vector<WallWitness> out;
  if (search_bound <= 0) return out;
  const StabilityCharge base = sigma.untwisted();
  const MajorantForm majorant = build_majorant(base);
  const Rational bound_sq = search_bound * search_bound;
  const IntMatrix& gram = base.mukai().gram();
  const Enumerator en(majorant.gram_q);
  const Rational q_bound = majorant.bound_for(search_bound);
  const auto [lo, hi] = en.outer_range(q_bound);
  LatticeVector v(en.dimension());
  en.for_each_candidate(q_bound, lo, hi, [&](const std::int64_t* x) {
    if (lattice_square(gram, x) != -2) return;
    std::copy(x, x + v.size(), v.begin());
    const auto z = central_charge(base, v);
    if (bound_sq < z.abs_sq.a) return;
    const bool vanishing = z.re_untwisted == 0 && z.im_over_t == 0;
    if (vanishing) {
      if (canonical_orientation(v)) out.push_back({MukaiVector::from_coords(v), z.abs_sq, true});
    } else if (z.im_over_t == 0 && z.re_untwisted < 0 && v.front() > 0) {
      out.push_back({MukaiVector::from_coords(v), z.abs_sq, false});
    }
  });
  std::stable_sort(out.begin(), out.end(),
                   [](const WallWitness& a, const WallWitness& b) { return a.vanishing && !b.vanishing; });
  return out;
}

std::optional<SystoleResult> systole_estimate(const StabilityCharge& sigma, const Rational& R) {
  if (R <= 0) return std::nullopt;
  const MajorantForm majorant = build_majorant(sigma);
  const Rational q_bound = majorant.bound_for(R);
  const Surd r_sq(R * R);
  const IntMatrix& gram = sigma.mukai().gram();
  const Enumerator en(majorant.gram_q);
  const auto [lo, hi] = en.outer_range(q_bound);
  std::optional<SystoleResult> best;
  LatticeVector v(en.dimension());
  en.for_each_candidate(q_bound, lo, hi, [&](const std::int64_t* x) {
    if (std::all_of(x, x + v.size(), [](std::int64_t c) { return c == 0; })) return;
    // Multiples m v0 have |Z| = m |Z(v0)|, so primitive candidates with
    // v^2 >= -2 already realise the minimum.
    if (lattice_square(gram, x) < -2) return;
    std::copy(x, x + v.size(), v.begin());
    const auto z = central_charge(sigma, v);
    if (z.abs_sq.sign() == 0 || !(z.abs_sq <= r_sq)) return;
    if (!best || z.abs_sq < best->abs_sq) {
      best = SystoleResult{z.abs_sq, std::sqrt(std::max(z.abs_sq.to_double(), 0.0)), MukaiVector::from_coords(v)};
    }
  });
  return best;
}

}  // namespace k3count
