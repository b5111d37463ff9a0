#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace k3count {

using Integer = mpz_class;
using Rational = mpq_class;

using IntVector = std::vector<std::int64_t>;
using IntMatrix = std::vector<IntVector>;
using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;

/// num/den in lowest terms. The two-argument mpq_class constructor does not
/// canonicalise, and non-canonical values compare wrongly.
Rational ratio(const Integer& num, const Integer& den);

/// Parses "p/q", "p" or "-p/q". Throws InputError on malformed text or q = 0.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when the denominator is 1).
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

/// Exact rational value of a finite double (every double is dyadic).
Rational rational_from_double(double x);

RationalVector to_rational(const IntVector& v);
RationalMatrix to_rational(const IntMatrix& m);
std::vector<double> to_double(const RationalVector& v);

std::int64_t to_int64(const Integer& z);  // throws InternalError on overflow

/// floor(sqrt(x)) for x >= 0.
Integer floor_sqrt(const Rational& x);

/// A rational upper bound u >= sqrt(x), tight to ~1e-15 relative.
Rational sqrt_upper(const Rational& x);

/// Sign of a + b*sqrt(d), d >= 0, decided without rounding.
int surd_sign(const Rational& a, const Rational& b, const Rational& d);
int surd_sign(const Integer& a, const Integer& b, const Integer& d);

/// a + b*sqrt(d). Values sharing the same d compare exactly.
struct Surd {
  Rational a;
  Rational b;
  Rational d;

  Surd() = default;
  explicit Surd(Rational value) : a(std::move(value)), b(0), d(0) {}
  Surd(Rational a_, Rational b_, Rational d_) : a(std::move(a_)), b(std::move(b_)), d(std::move(d_)) {}

  bool is_rational() const { return b == 0 || d == 0; }
  int sign() const { return surd_sign(a, b, d); }
  double to_double() const;

  Surd operator+(const Surd& o) const;
  Surd operator-(const Surd& o) const;
  Surd operator-() const { return Surd(-a, -b, d); }
  Surd scaled(const Rational& c) const { return Surd(a * c, b * c, d); }
};

bool operator==(const Surd& x, const Surd& y);
bool operator<(const Surd& x, const Surd& y);
bool operator<=(const Surd& x, const Surd& y);

std::string to_string(const Surd& s);

}  // namespace k3count
