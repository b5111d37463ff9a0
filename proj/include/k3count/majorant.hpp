#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "k3count/lattice.hpp"
#include "k3count/rational.hpp"

namespace k3count {

/// Positive definite rational form Q+ dominating a counting region:
/// every point of the region at radius R satisfies Q+(v) <= bound_for(R).
struct MajorantForm {
  RationalMatrix gram_q;
  Rational radius_scale;  // bound_for(R) = radius_scale * R^2 + slack
  Rational slack;

  Rational bound_for(const Rational& R) const { return radius_scale * R * R + slack; }
};

/// Validates positive definiteness with exact pivots; throws InternalError otherwise.
MajorantForm make_majorant(RationalMatrix gram_q, Rational radius_scale, Rational slack);

/// Fincke-Pohst enumeration over the exact LDL^T of a positive definite form.
/// Coordinate windows come from long double arithmetic widened outward, so the
/// candidate stream is a superset of {Q(v) <= bound}; exact acceptance is left
/// to the caller (contains()) or to the region test the caller applies.
class Enumerator {
 public:
  explicit Enumerator(const RationalMatrix& q);

  std::size_t dimension() const { return n_; }

  /// Inclusive window of the outermost (last) coordinate.
  std::pair<std::int64_t, std::int64_t> outer_range(const Rational& bound) const;

  /// Visits candidates in lexicographic order of (x_{n-1}, ..., x_0) with the
  /// outermost coordinate restricted to [lo, hi]. The visitor receives a
  /// pointer to n coordinates; the zero vector is visited too.
  template <class Visitor>
  void for_each_candidate(const Rational& bound, std::int64_t lo, std::int64_t hi, Visitor&& visit) const;

  /// Exact Q(v) <= bound.
  bool contains(const std::int64_t* v, const Rational& bound) const;

  /// Volume of the ellipsoid {Q <= bound}; a proxy for the candidate count.
  double estimated_points(const Rational& bound) const;

  const RationalMatrix& form() const { return q_; }

 private:
  template <class Visitor>
  void recurse(std::size_t level, long double remaining, std::int64_t* x, std::int64_t lo, std::int64_t hi,
               long double tolerance, Visitor& visit) const;

  std::size_t n_;
  RationalMatrix q_;
  std::vector<long double> diag_;
  std::vector<std::vector<long double>> mu_;  // mu_[i][j], j > i
  std::vector<std::vector<Integer>> q_int_;   // q_ * q_den_
  Integer q_den_;
  long double log_det_ = 0.0L;
};

/// Streams exactly the nonzero v with Q+(v) <= bound, in canonical order.
void enumerate_majorant(const MajorantForm& q, const Rational& bound,
                        const std::function<void(const LatticeVector&)>& yield);
std::vector<LatticeVector> collect_majorant(const MajorantForm& q, const Rational& bound);

/// F(x) = (l^T C l + sqrt(d) * l^T E l) / den with integer linear forms l = A x.
/// Membership tests F(x) <= W are decided exactly in integer arithmetic, on a
/// 128-bit fast path that falls back to GMP when a product would overflow.
class ExactQuadraticForm {
 public:
  ExactQuadraticForm() = default;
  /// rows: k rational linear forms on Z^n; c, e: k x k rational symmetric
  /// matrices; radicand: d >= 0 (ignored when e is zero).
  ExactQuadraticForm(const RationalMatrix& rows, const RationalMatrix& c, const RationalMatrix& e,
                     const Rational& radicand);

  /// Pure rational form x^T P x.
  static ExactQuadraticForm from_matrix(const RationalMatrix& p);

  std::size_t forms() const { return k_; }
  std::size_t dimension() const { return n_; }
  bool has_surd() const { return has_surd_; }

  /// Value of F at an integer point as a surd a + b sqrt(radicand).
  Surd evaluate(const LatticeVector& x) const;

  /// Prepared threshold F <= W.
  class Threshold {
   public:
    Threshold() = default;
    Threshold(const ExactQuadraticForm& f, const Rational& w);
    /// F(x) <= W.
    bool contains(const std::int64_t* x) const;
    /// m^2 F(x) <= W, for the largest such m >= 0 (F(x) > 0 required).
    std::int64_t max_multiple(const std::int64_t* x) const;

   private:
    bool decide(const Integer& x_val, const Integer& y_val, const Integer& scale) const;
    const ExactQuadraticForm* f_ = nullptr;
    Integer w_den_;
    Integer rhs_;  // W_num * den
    bool fast_ = false;
    __int128 w_den_fast_ = 0;
    __int128 rhs_fast_ = 0;
  };

 private:
  friend class Threshold;
  bool linear_values(const std::int64_t* x, std::int64_t* out) const;  // false on overflow
  void evaluate_parts(const std::int64_t* x, Integer& x_val, Integer& y_val) const;
  bool evaluate_fast(const std::int64_t* x, __int128& x_val, __int128& y_val) const;

  std::size_t k_ = 0;
  std::size_t n_ = 0;
  IntMatrix rows_;
  std::vector<std::vector<Integer>> c_, e_;
  IntMatrix c_fast_, e_fast_;
  bool coeffs_fit_ = false;
  Integer d_ = 0;
  __int128 d_fast_ = 0;
  bool d_fits_ = false;
  Integer den_ = 1;
  bool has_surd_ = false;
};

/// x^T G x for an integer Gram matrix, exact (128-bit with GMP fallback).
Integer lattice_square(const IntMatrix& gram, const std::int64_t* x);
bool lattice_square_fast(const IntMatrix& gram, const std::int64_t* x, __int128& out);

// ---------------------------------------------------------------------------

template <class Visitor>
void Enumerator::for_each_candidate(const Rational& bound, std::int64_t lo, std::int64_t hi, Visitor&& visit) const {
  if (bound < 0) return;
  const long double b = static_cast<long double>(bound.get_d());
  const long double tolerance = 1e-9L * (1.0L + b);
  std::vector<std::int64_t> x(n_, 0);
  recurse(n_ - 1, b + tolerance, x.data(), lo, hi, tolerance, visit);
}

template <class Visitor>
void Enumerator::recurse(std::size_t level, long double remaining, std::int64_t* x, std::int64_t lo,
                         std::int64_t hi, long double tolerance, Visitor& visit) const {
  long double center = 0.0L;
  for (std::size_t j = level + 1; j < n_; ++j) center -= mu_[level][j] * static_cast<long double>(x[j]);
  const long double half = std::sqrt(std::max(remaining, 0.0L) / diag_[level]);
  const long double slop = 1e-9L * (1.0L + std::fabs(center) + half);
  auto first = static_cast<std::int64_t>(std::ceil(center - half - slop));
  auto last = static_cast<std::int64_t>(std::floor(center + half + slop));
  if (level == n_ - 1) {
    first = std::max(first, lo);
    last = std::min(last, hi);
  }
  for (std::int64_t xi = first; xi <= last; ++xi) {
    x[level] = xi;
    const long double dev = static_cast<long double>(xi) - center;
    long double rest = remaining - diag_[level] * dev * dev;
    if (rest < -tolerance) continue;
    if (rest < 0) rest = 0;
    if (level == 0) {
      visit(static_cast<const std::int64_t*>(x));
    } else {
      recurse(level - 1, rest + tolerance, x, lo, hi, tolerance, visit);
    }
  }
  x[level] = 0;
}

}  // namespace k3count
