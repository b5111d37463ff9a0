#include "k3count/majorant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "k3count/errors.hpp"

namespace k3count {

namespace {

bool mul_ok(__int128 a, __int128 b, __int128& out) { return !__builtin_mul_overflow(a, b, &out); }
bool add_ok(__int128 a, __int128 b, __int128& out) { return !__builtin_add_overflow(a, b, &out); }

bool fits_int128(const Integer& z) {
  // 126 bits leaves headroom for the sign and one addition.
  return mpz_sizeinbase(z.get_mpz_t(), 2) <= 125;
}

__int128 to_int128(const Integer& z) {
  Integer mag = abs(z);
  const Integer high = mag >> 64;
  const Integer low = mag - (high << 64);
  unsigned __int128 v = static_cast<unsigned __int128>(high.get_ui()) << 64;
  v |= static_cast<unsigned __int128>(low.get_ui());
  const auto s = static_cast<__int128>(v);
  return z < 0 ? -s : s;
}

Integer from_int128(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 mag = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  Integer out = static_cast<unsigned long>(mag >> 64);
  out <<= 64;
  out += static_cast<unsigned long>(mag & 0xFFFFFFFFFFFFFFFFULL);
  return neg ? Integer(-out) : out;
}

int sign128(__int128 v) { return (v > 0) - (v < 0); }

}  // namespace

MajorantForm make_majorant(RationalMatrix gram_q, Rational radius_scale, Rational slack) {
  if (!is_positive_definite(gram_q)) throw InternalError("majorant form is not positive definite");
  return MajorantForm{std::move(gram_q), std::move(radius_scale), std::move(slack)};
}

Enumerator::Enumerator(const RationalMatrix& q) : n_(q.size()), q_(q) {
  if (n_ == 0) throw InputError("empty quadratic form");
  RationalMatrix a = q;
  diag_.assign(n_, 0.0L);
  mu_.assign(n_, std::vector<long double>(n_, 0.0L));
  for (std::size_t i = 0; i < n_; ++i) {
    const Rational d = a[i][i];
    if (d <= 0) throw InputError("majorant form is not positive definite");
    diag_[i] = static_cast<long double>(d.get_d());
    log_det_ += std::log(static_cast<long double>(d.get_d()));
    for (std::size_t j = i + 1; j < n_; ++j) mu_[i][j] = static_cast<long double>(Rational(a[i][j] / d).get_d());
    for (std::size_t k = i + 1; k < n_; ++k) {
      const Rational f = a[k][i] / d;
      for (std::size_t l = i + 1; l < n_; ++l) a[k][l] -= f * a[i][l];
    }
  }
  q_den_ = 1;
  for (const auto& row : q_)
    for (const auto& v : row) q_den_ = lcm(q_den_, v.get_den());
  q_int_.assign(n_, std::vector<Integer>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) q_int_[i][j] = Integer(q_[i][j] * q_den_);
}

std::pair<std::int64_t, std::int64_t> Enumerator::outer_range(const Rational& bound) const {
  if (bound < 0) return {1, 0};
  const long double b = static_cast<long double>(bound.get_d());
  const long double half = std::sqrt(b * (1.0L + 1e-9L) / diag_[n_ - 1]) + 1e-9L;
  return {static_cast<std::int64_t>(std::ceil(-half)), static_cast<std::int64_t>(std::floor(half))};
}

bool Enumerator::contains(const std::int64_t* v, const Rational& bound) const {
  Integer total = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    if (v[i] == 0) continue;
    Integer row = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (v[j] != 0) row += q_int_[i][j] * static_cast<long>(v[j]);
    }
    total += row * static_cast<long>(v[i]);
  }
  return total * bound.get_den() <= bound.get_num() * q_den_;
}

double Enumerator::estimated_points(const Rational& bound) const {
  if (bound <= 0) return 0.0;
  const double n = static_cast<double>(n_);
  const double log_ball = 0.5 * n * std::log(M_PI) - std::lgamma(0.5 * n + 1.0);
  const double log_vol = log_ball + 0.5 * n * std::log(bound.get_d()) - 0.5 * static_cast<double>(log_det_);
  return std::exp(log_vol);
}

void enumerate_majorant(const MajorantForm& q, const Rational& bound,
                        const std::function<void(const LatticeVector&)>& yield) {
  const Enumerator en(q.gram_q);
  const auto [lo, hi] = en.outer_range(bound);
  LatticeVector v(en.dimension());
  en.for_each_candidate(bound, lo, hi, [&](const std::int64_t* x) {
    if (std::all_of(x, x + en.dimension(), [](std::int64_t c) { return c == 0; })) return;
    if (!en.contains(x, bound)) return;
    std::copy(x, x + en.dimension(), v.begin());
    yield(v);
  });
}

std::vector<LatticeVector> collect_majorant(const MajorantForm& q, const Rational& bound) {
  std::vector<LatticeVector> out;
  enumerate_majorant(q, bound, [&](const LatticeVector& v) { out.push_back(v); });
  return out;
}

ExactQuadraticForm::ExactQuadraticForm(const RationalMatrix& rows, const RationalMatrix& c, const RationalMatrix& e,
                                       const Rational& radicand)
    : k_(rows.size()), n_(rows.empty() ? 0 : rows[0].size()) {
  if (k_ == 0 || n_ == 0) throw InputError("quadratic form needs at least one linear form");
  if (c.size() != k_ || e.size() != k_) throw InputError("coefficient matrix size mismatch");
  if (radicand < 0) throw InputError("negative radicand");

  std::vector<Integer> row_scale(k_, 1);
  rows_.assign(k_, IntVector(n_, 0));
  for (std::size_t i = 0; i < k_; ++i) {
    if (rows[i].size() != n_) throw InputError("linear form length mismatch");
    for (const auto& v : rows[i]) row_scale[i] = lcm(row_scale[i], v.get_den());
    for (std::size_t j = 0; j < n_; ++j) rows_[i][j] = to_int64(Integer(rows[i][j] * row_scale[i]));
  }

  RationalMatrix cc(k_, RationalVector(k_)), ee(k_, RationalVector(k_));
  bool any_e = false;
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) {
      const Rational s = Rational(row_scale[i] * row_scale[j]);
      cc[i][j] = c[i][j] / s;
      ee[i][j] = e[i][j] / s;
      if (ee[i][j] != 0) any_e = true;
    }
  }
  if (any_e && radicand != 0) {
    // sqrt(p/q) = sqrt(p q) / q.
    Integer d = radicand.get_num() * radicand.get_den();
    for (auto& row : ee)
      for (auto& v : row) v /= radicand.get_den();
    Integer root;
    mpz_sqrt(root.get_mpz_t(), d.get_mpz_t());
    if (root * root == d) {
      for (std::size_t i = 0; i < k_; ++i)
        for (std::size_t j = 0; j < k_; ++j) cc[i][j] += ee[i][j] * root;
      any_e = false;
    } else {
      d_ = d;
    }
  } else {
    any_e = false;
  }
  has_surd_ = any_e;

  den_ = 1;
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) {
      den_ = lcm(den_, cc[i][j].get_den());
      if (has_surd_) den_ = lcm(den_, ee[i][j].get_den());
    }
  }
  c_.assign(k_, std::vector<Integer>(k_, 0));
  e_.assign(k_, std::vector<Integer>(k_, 0));
  coeffs_fit_ = true;
  c_fast_.assign(k_, IntVector(k_, 0));
  e_fast_.assign(k_, IntVector(k_, 0));
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) {
      c_[i][j] = Integer(cc[i][j] * den_);
      if (has_surd_) e_[i][j] = Integer(ee[i][j] * den_);
      if (!c_[i][j].fits_slong_p() || !e_[i][j].fits_slong_p()) {
        coeffs_fit_ = false;
      } else {
        c_fast_[i][j] = c_[i][j].get_si();
        e_fast_[i][j] = e_[i][j].get_si();
      }
    }
  }
  d_fits_ = d_.fits_slong_p();
  if (d_fits_) d_fast_ = d_.get_si();
}

ExactQuadraticForm ExactQuadraticForm::from_matrix(const RationalMatrix& p) {
  const std::size_t n = p.size();
  RationalMatrix rows(n, RationalVector(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) rows[i][i] = 1;
  RationalMatrix zero(n, RationalVector(n, Rational(0)));
  return ExactQuadraticForm(rows, p, zero, Rational(0));
}

bool ExactQuadraticForm::linear_values(const std::int64_t* x, std::int64_t* out) const {
  for (std::size_t i = 0; i < k_; ++i) {
    __int128 acc = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      __int128 term;
      if (!mul_ok(rows_[i][j], x[j], term) || !add_ok(acc, term, acc)) return false;
    }
    if (acc > std::numeric_limits<std::int64_t>::max() || acc < std::numeric_limits<std::int64_t>::min()) return false;
    out[i] = static_cast<std::int64_t>(acc);
  }
  return true;
}

bool ExactQuadraticForm::evaluate_fast(const std::int64_t* x, __int128& x_val, __int128& y_val) const {
  if (!coeffs_fit_) return false;
  std::int64_t l[16];
  if (k_ > 16 || !linear_values(x, l)) return false;
  x_val = 0;
  y_val = 0;
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) {
      __int128 prod, term;
      if (!mul_ok(l[i], l[j], prod)) return false;
      if (c_fast_[i][j] != 0) {
        if (!mul_ok(prod, c_fast_[i][j], term) || !add_ok(x_val, term, x_val)) return false;
      }
      if (has_surd_ && e_fast_[i][j] != 0) {
        if (!mul_ok(prod, e_fast_[i][j], term) || !add_ok(y_val, term, y_val)) return false;
      }
    }
  }
  return true;
}

void ExactQuadraticForm::evaluate_parts(const std::int64_t* x, Integer& x_val, Integer& y_val) const {
  std::vector<Integer> l(k_, 0);
  for (std::size_t i = 0; i < k_; ++i)
    for (std::size_t j = 0; j < n_; ++j) l[i] += Integer(static_cast<long>(rows_[i][j])) * static_cast<long>(x[j]);
  x_val = 0;
  y_val = 0;
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) {
      const Integer prod = l[i] * l[j];
      x_val += c_[i][j] * prod;
      if (has_surd_) y_val += e_[i][j] * prod;
    }
  }
}

Surd ExactQuadraticForm::evaluate(const LatticeVector& x) const {
  if (x.size() != n_) throw InputError("point dimension mismatch");
  Integer xv, yv;
  evaluate_parts(x.data(), xv, yv);
  return Surd(ratio(xv, den_), ratio(yv, den_), Rational(d_));
}

ExactQuadraticForm::Threshold::Threshold(const ExactQuadraticForm& f, const Rational& w)
    : f_(&f), w_den_(w.get_den()), rhs_(w.get_num() * f.den_) {
  fast_ = fits_int128(w_den_) && fits_int128(rhs_) && mpz_sizeinbase(w_den_.get_mpz_t(), 2) < 62 &&
          mpz_sizeinbase(rhs_.get_mpz_t(), 2) < 120;
  if (fast_) {
    w_den_fast_ = to_int128(w_den_);
    rhs_fast_ = to_int128(rhs_);
  }
}

bool ExactQuadraticForm::Threshold::decide(const Integer& x_val, const Integer& y_val, const Integer& scale) const {
  const Integer a = rhs_ - w_den_ * scale * x_val;
  const Integer b = -(w_den_ * scale * y_val);
  return surd_sign(a, b, f_->d_) >= 0;
}

bool ExactQuadraticForm::Threshold::contains(const std::int64_t* x) const {
  if (fast_) {
    __int128 xv, yv;
    if (f_->evaluate_fast(x, xv, yv)) {
      __int128 t, a;
      if (mul_ok(w_den_fast_, xv, t) && !__builtin_sub_overflow(rhs_fast_, t, &a)) {
        if (!f_->has_surd_ || yv == 0) return a >= 0;
        __int128 b;
        if (mul_ok(w_den_fast_, yv, b)) {
          b = -b;
          const int sa = sign128(a), sb = sign128(b);
          if (sa >= 0 && sb >= 0) return true;
          if (sa <= 0 && sb <= 0) return false;
          __int128 a2, b2, b2d;
          if (f_->d_fits_ && mul_ok(a, a, a2) && mul_ok(b, b, b2) && mul_ok(b2, f_->d_fast_, b2d)) {
            // sa > 0 > sb: need a^2 >= b^2 d; sa < 0 < sb: need b^2 d >= a^2.
            return sa > 0 ? a2 >= b2d : b2d >= a2;
          }
        }
      }
    }
  }
  Integer xv, yv;
  f_->evaluate_parts(x, xv, yv);
  return decide(xv, yv, Integer(1));
}

std::int64_t ExactQuadraticForm::Threshold::max_multiple(const std::int64_t* x) const {
  Integer xv, yv;
  f_->evaluate_parts(x, xv, yv);
  const double value = (xv.get_d() + yv.get_d() * std::sqrt(f_->d_.get_d())) / f_->den_.get_d();
  const double w = rhs_.get_d() / (w_den_.get_d() * f_->den_.get_d());
  if (!(value > 0.0)) throw InternalError("max_multiple needs a positive form value");
  auto fits = [&](std::int64_t m) { return decide(xv, yv, Integer(static_cast<long>(m * m))); };
  auto m = static_cast<std::int64_t>(std::floor(std::sqrt(std::max(w, 0.0) / value)));
  m = std::max<std::int64_t>(m - 1, 0);
  while (fits(m + 1)) ++m;
  while (m > 0 && !fits(m)) --m;
  return m;
}

bool lattice_square_fast(const IntMatrix& gram, const std::int64_t* x, __int128& out) {
  const std::size_t n = gram.size();
  out = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == 0) continue;
    __int128 row = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (gram[i][j] == 0 || x[j] == 0) continue;
      __int128 t;
      if (!mul_ok(gram[i][j], x[j], t) || !add_ok(row, t, row)) return false;
    }
    __int128 t;
    if (!mul_ok(row, x[i], t) || !add_ok(out, t, out)) return false;
  }
  return true;
}

Integer lattice_square(const IntMatrix& gram, const std::int64_t* x) {
  __int128 fast;
  if (lattice_square_fast(gram, x, fast)) return from_int128(fast);
  Integer total = 0;
  const std::size_t n = gram.size();
  for (std::size_t i = 0; i < n; ++i) {
    Integer row = 0;
    for (std::size_t j = 0; j < n; ++j) row += Integer(static_cast<long>(gram[i][j])) * static_cast<long>(x[j]);
    total += row * static_cast<long>(x[i]);
  }
  return total;
}

}  // namespace k3count
