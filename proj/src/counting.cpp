#include "k3count/counting.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "k3count/errors.hpp"

namespace k3count {

std::optional<double> CountReport::rel_err() const {
  if (!analytic_C || *analytic_C == 0.0) return std::nullopt;
  return std::fabs(normalized - *analytic_C) / *analytic_C;
}

namespace {

/// Exact rational upper bound for the largest eigenvalue of (g g^T)^-1.
Rational inverse_norm_bound(const GLPlusElement& g) {
  if (g.conformal_scale_sq()) return 1 / *g.conformal_scale_sq();
  const Matrix2Q m = g.norm_matrix();
  const Rational tr = m[0][0] + m[1][1];
  const Rational det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  Rational disc = tr * tr - 4 * det;
  if (disc < 0) disc = 0;
  // lambda_min(M) = 2 det / (tr + sqrt(disc)).
  return (tr + sqrt_upper(disc)) / (2 * det);
}

double normalize(const Integer& total, const Rational& R, int dimension) {
  if (R <= 0) return 0.0;
  return total.get_d() / std::pow(R.get_d(), dimension);
}

std::int64_t elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
}

std::string witness_message(const WallWitness& w) {
  return "spherical class " + w.delta.to_string() + " has Z = 0";
}

}  // namespace

MajorantForm build_majorant(const StabilityCharge& sigma) {
  const IntegerLattice& mukai = sigma.mukai();
  const RationalVector alpha = pairing_row(mukai, sigma.re_phi());
  const RationalVector beta = pairing_row(mukai, sigma.im_phi_direction());
  const std::size_t n = mukai.rank();
  const Rational two_over = Rational(2) / sigma.omega_sq();
  RationalMatrix q(n, RationalVector(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      q[i][j] = two_over * (alpha[i] * alpha[j] + sigma.t_sq() * beta[i] * beta[j]) - mukai.gram(i, j);
  return make_majorant(std::move(q), two_over * inverse_norm_bound(sigma.twist()), Rational(2));
}

ExactQuadraticForm charge_norm_form(const StabilityCharge& sigma) {
  const IntegerLattice& mukai = sigma.mukai();
  const RationalMatrix rows{pairing_row(mukai, sigma.re_phi()), pairing_row(mukai, sigma.im_phi_direction())};
  const Rational& d = sigma.t_sq();
  RationalMatrix c(2, RationalVector(2, Rational(0)));
  RationalMatrix e(2, RationalVector(2, Rational(0)));
  const Matrix2Q m = sigma.twist().norm_matrix();
  c[0][0] = m[0][0];
  c[1][1] = m[1][1] * d;
  e[0][1] = m[0][1];
  e[1][0] = m[1][0];
  return ExactQuadraticForm(rows, c, e, d);
}

RegionTally count_region_problem(const RegionProblem& problem, const Rational& R, const CountOptions& opts) {
  if (R < 0) throw InputError("R must be nonnegative");
  const Rational bound = problem.majorant.bound_for(R);
  const Enumerator en(problem.majorant.gram_q);
  RegionTally tally;
  tally.candidates = en.estimated_points(bound);
  if (tally.candidates > opts.point_budget) {
    char text[96];
    std::snprintf(text, sizeof text, "enumeration needs about %.3g candidates", tally.candidates);
    throw BudgetExceeded(text, tally.candidates, opts.point_budget);
  }
  const ExactQuadraticForm::Threshold region(problem.norm, R * R);
  const ExactQuadraticForm::Threshold zero(problem.norm, Rational(0));
  const IntMatrix& gram = problem.lattice.gram();
  const std::size_t n = en.dimension();
  const bool multiples = problem.negatives == NegativeClasses::SphericalMultiples;
  const std::int64_t floor = multiples ? std::max<std::int64_t>(problem.square_floor, -2) : problem.square_floor;

  const auto [lo, hi] = en.outer_range(bound);
  const unsigned threads = std::max(1u, opts.threads);
  std::atomic<std::int64_t> next{lo};
  std::atomic<bool> abort{false};
  std::exception_ptr failure;
  std::mutex merge_mutex;
  Integer nonneg_total = 0;
  Integer negative_total = 0;

  auto worker = [&] {
    std::uint64_t nonneg = 0;
    std::uint64_t negative = 0;
    try {
      for (std::int64_t slice = next++; slice <= hi && !abort; slice = next++) {
        en.for_each_candidate(bound, slice, slice, [&](const std::int64_t* x) {
          if (std::all_of(x, x + n, [](std::int64_t c) { return c == 0; })) return;
          __int128 sq128 = 0;
          bool below_floor;
          bool nonneg_square;
          if (lattice_square_fast(gram, x, sq128)) {
            below_floor = sq128 < floor;
            nonneg_square = sq128 >= 0;
          } else {
            const Integer sq = lattice_square(gram, x);
            below_floor = sq < floor;
            nonneg_square = sq >= 0;
          }
          if (below_floor || !region.contains(x)) return;
          if (nonneg_square) {
            ++nonneg;
          } else if (!multiples) {
            ++negative;
          } else {
            if (zero.contains(x)) {
              const MukaiVector delta = MukaiVector::from_coords(LatticeVector(x, x + n));
              throw WallViolation("spherical class " + delta.to_string() + " has Z = 0", delta.to_string());
            }
            negative += static_cast<std::uint64_t>(region.max_multiple(x));
          }
        });
      }
    } catch (...) {
      abort = true;
      std::lock_guard lock(merge_mutex);
      if (!failure) failure = std::current_exception();
    }
    std::lock_guard lock(merge_mutex);
    nonneg_total += Integer(std::to_string(nonneg));
    negative_total += Integer(std::to_string(negative));
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  tally.square_nonneg = nonneg_total;
  tally.negative = negative_total;
  return tally;
}

CountReport count_semistable(const StabilityCharge& sigma, const Rational& R, const CountOptions& opts) {
  if (R < 0) throw InputError("R must be nonnegative");
  const auto t0 = std::chrono::steady_clock::now();
  CountReport report;
  report.kind = "semistable";
  report.R = R;
  report.dimension = static_cast<int>(sigma.rho()) + 2;
  for (auto& w : genericity_check(sigma, R)) {
    if (w.vanishing) throw WallViolation(witness_message(w), w.delta.to_string());
    report.wall_warnings.push_back(std::move(w));
  }
  const RegionProblem problem{sigma.mukai(), charge_norm_form(sigma), build_majorant(sigma), -2,
                              NegativeClasses::SphericalMultiples};
  const RegionTally tally = count_region_problem(problem, R, opts);
  report.square_nonneg = tally.square_nonneg;
  report.spherical_multiples = tally.negative;
  report.total = tally.square_nonneg + tally.negative;
  report.normalized = normalize(report.total, R, report.dimension);
  report.analytic_C = static_cast<double>(coefficient_for(sigma).value);
  report.elapsed_ms = elapsed_since(t0);
  return report;
}

Integer count_region(const IntegerLattice& L, const RationalMatrix& psd_form, const Rational& R,
                     std::optional<std::int64_t> square_floor, const CountOptions& opts) {
  const std::size_t n = L.rank();
  if (psd_form.size() != n) throw InputError("form size does not match the lattice rank");
  for (const auto& row : psd_form) {
    if (row.size() != n) throw InputError("form must be square");
  }
  RegionProblem problem;
  problem.lattice = L;
  problem.norm = ExactQuadraticForm::from_matrix(psd_form);
  problem.negatives = NegativeClasses::Literal;
  if (!square_floor) {
    if (!is_positive_definite(psd_form)) throw InputError("region unbounded: form is not positive definite");
    problem.square_floor = std::numeric_limits<std::int64_t>::min();
    problem.majorant = make_majorant(psd_form, Rational(1), Rational(0));
  } else {
    // On the region, c P - G <= c R^2 - floor.
    Rational c = 1;
    RationalMatrix q(n, RationalVector(n));
    bool found = false;
    for (int attempt = 0; attempt < 48 && !found; ++attempt, c *= 2) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q[i][j] = c * psd_form[i][j] - L.gram(i, j);
      found = is_positive_definite(q);
      if (found) break;
    }
    if (!found) throw InputError("region unbounded: no multiple of the form dominates the lattice form");
    problem.square_floor = *square_floor;
    problem.majorant = make_majorant(std::move(q), c, Rational(-*square_floor) > 0 ? Rational(-*square_floor) : Rational(0));
  }
  const RegionTally tally = count_region_problem(problem, R, opts);
  return tally.square_nonneg + tally.negative;
}

SweepResult convergence_sweep(const StabilityCharge& sigma, const std::vector<Rational>& R_list,
                              const CountOptions& opts) {
  if (R_list.empty()) throw InputError("R list is empty");
  for (std::size_t i = 0; i < R_list.size(); ++i) {
    if (R_list[i] <= 0) throw InputError("R values must be positive");
    if (i > 0 && !(R_list[i - 1] < R_list[i])) throw InputError("R list must be strictly increasing");
  }
  SweepResult out;
  out.analytic = coefficient_for(sigma);
  for (const auto& R : R_list) {
    CountReport report = count_semistable(sigma, R, opts);
    report.analytic_C = static_cast<double>(out.analytic.value);
    out.reports.push_back(std::move(report));
  }
  return out;
}

namespace {

struct Box {
  std::vector<std::int64_t> half;
  double points = 1.0;
};

Box derive_box(const MajorantForm& majorant, const Rational& bound) {
  const RationalMatrix inv = inverse(majorant.gram_q);
  Box box;
  for (std::size_t i = 0; i < inv.size(); ++i) {
    // |x_i|^2 <= bound * (Q^-1)_ii on the ellipsoid Q(x) <= bound.
    const Integer h = floor_sqrt(bound * inv[i][i]);
    box.half.push_back(to_int64(h));
    box.points *= 2.0 * h.get_d() + 1.0;
  }
  return box;
}

template <class Visit>
void scan_box(const Box& box, Visit&& visit) {
  const std::size_t n = box.half.size();
  LatticeVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = -box.half[i];
  while (true) {
    visit(x);
    std::size_t i = 0;
    while (i < n && x[i] == box.half[i]) {
      x[i] = -box.half[i];
      ++i;
    }
    if (i == n) return;
    ++x[i];
  }
}

bool is_zero(const LatticeVector& v) {
  return std::all_of(v.begin(), v.end(), [](std::int64_t c) { return c == 0; });
}

}  // namespace

CountReport brute_force_box_count(const StabilityCharge& sigma, const Rational& R, double box_budget) {
  if (R < 0) throw InputError("R must be nonnegative");
  const auto t0 = std::chrono::steady_clock::now();
  const MajorantForm majorant = build_majorant(sigma);
  const IntegerLattice& mukai = sigma.mukai();
  const Surd r_sq(R * R);

  auto checked_box = [&](const Rational& bound) {
    Box box = derive_box(majorant, bound);
    if (box.points > box_budget) {
      throw BudgetExceeded("box oracle needs " + std::to_string(box.points) + " points", box.points, box_budget);
    }
    return box;
  };

  // Stage 1: every primitive class with v0^2 >= -2 and |Z| <= R lies in the
  // standard box. Record the smallest |Z(delta)| over spherical classes.
  std::optional<Surd> min_spherical;
  scan_box(checked_box(majorant.bound_for(R)), [&](const LatticeVector& v) {
    if (is_zero(v)) return;
    const Integer sq = square(mukai, v);
    if (sq >= 0 || sq < -2) return;
    const auto z = central_charge(sigma, v);
    if (z.abs_sq.sign() == 0) {
      const MukaiVector delta = MukaiVector::from_coords(v);
      throw WallViolation("spherical class " + delta.to_string() + " has Z = 0", delta.to_string());
    }
    if (!(z.abs_sq <= r_sq)) return;
    if (!min_spherical || z.abs_sq < *min_spherical) min_spherical = z.abs_sq;
  });

  // Stage 2: multiples m delta need Q+(m delta) <= radius_scale R^2 + 2 m^2.
  std::int64_t m_max = 1;
  if (min_spherical) {
    while ((*min_spherical).scaled(Rational((m_max + 1) * (m_max + 1))) <= r_sq) ++m_max;
  }
  const Rational bound2 = majorant.radius_scale * R * R + majorant.slack * m_max * m_max;

  CountReport report;
  report.kind = "oracle";
  report.R = R;
  report.dimension = static_cast<int>(sigma.rho()) + 2;
  scan_box(checked_box(bound2), [&](const LatticeVector& v) {
    if (is_zero(v)) return;
    const PrimitiveDecomposition pd = primitive_decompose(v);
    const Integer v0_sq = square(mukai, pd.primitive);
    if (v0_sq < -2) return;
    const auto z = central_charge(sigma, v);
    if (!(z.abs_sq <= r_sq)) return;
    if (v0_sq >= 0) {
      report.square_nonneg += 1;
    } else {
      report.spherical_multiples += 1;
    }
  });
  report.total = report.square_nonneg + report.spherical_multiples;
  report.normalized = normalize(report.total, R, report.dimension);
  report.elapsed_ms = elapsed_since(t0);
  return report;
}

}  // namespace k3count
