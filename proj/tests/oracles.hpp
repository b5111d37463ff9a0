#pragma once

// Reference computations that share no code path with the library: plain
// coordinate formulas, fixed boxes and exact sign arguments written out by hand.

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <gmpxx.h>

namespace oracle {

using Q = mpq_class;
using Z = mpz_class;
using Vec = std::vector<std::int64_t>;
using Mat = std::vector<Vec>;

struct Charge {
  Mat ns;           // Neron-Severi Gram
  std::vector<Q> B;
  Vec h;            // omega = t h
  Q t_sq;
  Q g[2][2] = {{1, 0}, {0, 1}};  // (Re', Im') = (Re, Im) g
};

inline Q dot(const Mat& g, const std::vector<Q>& u, const std::vector<Q>& v) {
  Q out = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out += u[i] * g[i][j] * v[j];
  return out;
}

inline std::vector<Q> as_q(const Vec& v) { return std::vector<Q>(v.begin(), v.end()); }

/// Re Z = B.D - s - r (B^2 - omega^2) / 2 and Im Z / t = h.D - r B.h for v = (r, D, s).
inline void charge_parts(const Charge& c, const Vec& v, Q& re, Q& im_over_t) {
  const std::size_t rho = c.ns.size();
  const Q r = v.front();
  const Q s = v.back();
  const std::vector<Q> D(v.begin() + 1, v.begin() + 1 + static_cast<std::ptrdiff_t>(rho));
  const std::vector<Q> h = as_q(c.h);
  const Q b_sq = dot(c.ns, c.B, c.B);
  const Q w_sq = c.t_sq * dot(c.ns, h, h);
  re = dot(c.ns, c.B, D) - s - r * (b_sq - w_sq) / 2;
  im_over_t = dot(c.ns, h, D) - r * dot(c.ns, c.B, h);
}

/// |Z'(v)|^2 <= R^2, with |Z'|^2 = X + Y t, decided by squaring.
inline bool within(const Charge& c, const Vec& v, const Q& R) {
  Q a, b;
  charge_parts(c, v, a, b);
  const Q x = a * c.g[0][0] * a * c.g[0][0] + c.t_sq * b * c.g[1][0] * b * c.g[1][0] + a * c.g[0][1] * a * c.g[0][1] +
              c.t_sq * b * c.g[1][1] * b * c.g[1][1];
  const Q y = 2 * a * b * (c.g[0][0] * c.g[1][0] + c.g[0][1] * c.g[1][1]);
  const Q d = R * R - x;
  if (y == 0) return d >= 0;
  if (y < 0) return d >= 0 || y * y * c.t_sq >= d * d;
  return d >= 0 && y * y * c.t_sq <= d * d;
}

inline std::int64_t mukai_square(const Charge& c, const Vec& v) {
  const std::size_t rho = c.ns.size();
  std::int64_t dd = 0;
  for (std::size_t i = 0; i < rho; ++i)
    for (std::size_t j = 0; j < rho; ++j) dd += v[i + 1] * c.ns[i][j] * v[j + 1];
  return dd - 2 * v.front() * v.back();
}

inline std::int64_t content(const Vec& v) {
  std::int64_t g = 0;
  for (auto x : v) g = std::gcd(g, x < 0 ? -x : x);
  return g;
}

struct SemistableCount {
  std::int64_t total = 0;
  std::int64_t square_nonneg = 0;
  std::int64_t spherical = 0;       // m * v0 with v0^2 < 0
  std::int64_t higher_multiples = 0;  // the part of `spherical` with m >= 2
  std::int64_t literal = 0;         // v^2 >= -2 taken literally
};

/// Scans the cube |x_i| <= K of Mukai coordinates.
inline SemistableCount semistable_in_cube(const Charge& c, const Q& R, std::int64_t K) {
  const std::size_t n = c.ns.size() + 2;
  SemistableCount out;
  Vec v(n, -K);
  while (true) {
    const std::int64_t m = content(v);
    if (m != 0) {
      const std::int64_t sq = mukai_square(c, v);
      const std::int64_t sq0 = sq / (m * m);
      if ((sq0 >= -2 || sq >= -2) && within(c, v, R)) {
        if (sq0 >= -2) {
          ++out.total;
          if (sq0 >= 0) {
            ++out.square_nonneg;
          } else {
            ++out.spherical;
            if (m >= 2) ++out.higher_multiples;
          }
        }
        if (sq >= -2) ++out.literal;
      }
    }
    std::size_t i = 0;
    while (i < n && v[i] == K) v[i++] = -K;
    if (i == n) break;
    ++v[i];
  }
  return out;
}

/// #{x in [-K, K]^n, x != 0 : x^T P x <= R^2, x^T G x >= floor}.
inline std::int64_t region_in_cube(const Mat& gram, const std::vector<std::vector<Q>>& p, const Q& R,
                                   std::int64_t floor, std::int64_t K) {
  const std::size_t n = gram.size();
  std::int64_t out = 0;
  Vec v(n, -K);
  while (true) {
    bool zero = true;
    for (auto x : v) zero = zero && x == 0;
    if (!zero) {
      std::int64_t sq = 0;
      Q pv = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          sq += v[i] * gram[i][j] * v[j];
          pv += p[i][j] * v[i] * v[j];
        }
      if (sq >= floor && pv <= R * R) ++out;
    }
    std::size_t i = 0;
    while (i < n && v[i] == K) v[i++] = -K;
    if (i == n) break;
    ++v[i];
  }
  return out;
}

/// Deterministic generator for property tests.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double real(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  Vec vector(std::size_t n, std::int64_t bound) {
    Vec v(n);
    for (auto& x : v) x = uniform(-bound, bound);
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace oracle
