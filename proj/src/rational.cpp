#include "k3count/rational.hpp"

#include <cmath>
#include <limits>

#include "k3count/errors.hpp"

namespace k3count {

namespace {

bool is_integer_text(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

Integer parse_integer(std::string_view s) {
  if (!is_integer_text(s)) throw InputError("malformed rational '" + std::string(s) + "'");
  if (s[0] == '+') s.remove_prefix(1);
  return Integer(std::string(s));
}

}  // namespace

Rational ratio(const Integer& num, const Integer& den) {
  if (den == 0) throw InputError("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text));
  Integer num = parse_integer(text.substr(0, slash));
  Integer den = parse_integer(text.substr(slash + 1));
  if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::string to_string(const Integer& z) { return z.get_str(); }

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw InputError("non-finite value");
  Rational q;
  mpq_set_d(q.get_mpq_t(), x);
  return q;
}

RationalVector to_rational(const IntVector& v) {
  RationalVector out;
  out.reserve(v.size());
  for (auto x : v) out.emplace_back(static_cast<long>(x));
  return out;
}

RationalMatrix to_rational(const IntMatrix& m) {
  RationalMatrix out;
  out.reserve(m.size());
  for (const auto& row : m) out.push_back(to_rational(row));
  return out;
}

std::vector<double> to_double(const RationalVector& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(x.get_d());
  return out;
}

std::int64_t to_int64(const Integer& z) {
  if (!z.fits_slong_p()) throw InternalError("integer " + z.get_str() + " exceeds 64 bits");
  return z.get_si();
}

Integer floor_sqrt(const Rational& x) {
  if (x < 0) throw InputError("floor_sqrt of a negative value");
  Integer fl = x.get_num() / x.get_den();  // truncation == floor for x >= 0
  Integer r;
  mpz_sqrt(r.get_mpz_t(), fl.get_mpz_t());
  return r;
}

Rational sqrt_upper(const Rational& x) {
  if (x < 0) throw InputError("sqrt_upper of a negative value");
  if (x == 0) return Rational(0);
  double guess = std::sqrt(x.get_d());
  Rational u = rational_from_double(std::nextafter(guess, std::numeric_limits<double>::infinity()));
  while (u * u < x) {
    guess = std::nextafter(u.get_d(), std::numeric_limits<double>::infinity()) * (1.0 + 1e-15);
    u = rational_from_double(guess);
  }
  return u;
}

int surd_sign(const Rational& a, const Rational& b, const Rational& d) {
  const int sa = sgn(a);
  const int sb = (d == 0) ? 0 : sgn(b);
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  // Opposite signs: compare a^2 with b^2 d.
  const int cmp = sgn(Rational(a * a - b * b * d));
  return sa > 0 ? cmp : -cmp;
}

int surd_sign(const Integer& a, const Integer& b, const Integer& d) {
  const int sa = sgn(a);
  const int sb = (d == 0) ? 0 : sgn(b);
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  const int cmp = sgn(Integer(a * a - b * b * d));
  return sa > 0 ? cmp : -cmp;
}

namespace {

Rational common_radicand(const Surd& x, const Surd& y) {
  if (x.is_rational()) return y.d;
  if (y.is_rational()) return x.d;
  if (x.d != y.d) throw InternalError("surds with different radicands");
  return x.d;
}

}  // namespace

double Surd::to_double() const { return a.get_d() + b.get_d() * std::sqrt(d.get_d()); }

Surd Surd::operator+(const Surd& o) const {
  const Rational r = common_radicand(*this, o);
  return Surd(a + o.a, (d == 0 ? Rational(0) : b) + (o.d == 0 ? Rational(0) : o.b), r);
}

Surd Surd::operator-(const Surd& o) const { return *this + (-o); }

bool operator==(const Surd& x, const Surd& y) { return (x - y).sign() == 0; }
bool operator<(const Surd& x, const Surd& y) { return (x - y).sign() < 0; }
bool operator<=(const Surd& x, const Surd& y) { return (x - y).sign() <= 0; }

std::string to_string(const Surd& s) {
  if (s.is_rational()) return to_string(s.a);
  return to_string(s.a) + " + " + to_string(s.b) + "*sqrt(" + to_string(s.d) + ")";
}

}  // namespace k3count
