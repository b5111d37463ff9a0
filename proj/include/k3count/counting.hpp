#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "k3count/analytic.hpp"
#include "k3count/charge.hpp"
#include "k3count/lattice.hpp"
#include "k3count/majorant.hpp"
#include "k3count/rational.hpp"

namespace k3count {

struct CountOptions {
  unsigned threads = 1;
  double point_budget = 1e9;  // refuse when the majorant ellipsoid holds more candidates
};

/// For count_semistable, spherical_multiples is the m*delta (delta^2 = -2) term.
/// For the literal counts (region, slag, twistor) it holds the classes with
/// negative square that passed the floor.
struct CountReport {
  std::string kind;  // semistable | oracle | region | slag | twistor
  Rational R;
  Integer total;
  Integer square_nonneg;
  Integer spherical_multiples;
  int dimension = 0;  // normalized = total / R^dimension
  double normalized = 0.0;
  std::optional<double> analytic_C;
  std::vector<WallWitness> wall_warnings;
  std::int64_t elapsed_ms = 0;

  std::optional<double> rel_err() const;
};

/// Q+(v) = 2 |Z_untwisted(v)|^2 / omega^2 - <v,v>; bound 2 c R^2 / omega^2 + 2,
/// with c an exact upper bound for the largest eigenvalue of (g g^T)^-1.
MajorantForm build_majorant(const StabilityCharge& sigma);

/// |Z(v)|^2 (twist included) as an exact form on Mukai coordinates.
ExactQuadraticForm charge_norm_form(const StabilityCharge& sigma);

enum class NegativeClasses {
  Literal,             // count v with square_floor <= v^2 < 0 as they are
  SphericalMultiples,  // replace each spherical delta by its multiples m*delta in the region
};

/// A region {v != 0 : F(v) <= R^2, v^2 >= floor} together with a majorant.
struct RegionProblem {
  IntegerLattice lattice;
  ExactQuadraticForm norm;
  MajorantForm majorant;
  std::int64_t square_floor = -2;
  NegativeClasses negatives = NegativeClasses::Literal;
};

struct RegionTally {
  Integer square_nonneg;
  Integer negative;
  double candidates = 0.0;
};

/// The shared enumeration kernel. Work is split on the outermost coordinate
/// and merged by addition, so the tally is independent of opts.threads.
RegionTally count_region_problem(const RegionProblem& problem, const Rational& R, const CountOptions& opts);

CountReport count_semistable(const StabilityCharge& sigma, const Rational& R, const CountOptions& opts = {});

/// #{x != 0 : x^T P x <= R^2, <x,x> >= square_floor}. Without a floor P must be
/// positive definite; with one, c P - G must become positive definite for some c.
Integer count_region(const IntegerLattice& L, const RationalMatrix& psd_form, const Rational& R,
                     std::optional<std::int64_t> square_floor, const CountOptions& opts = {});

struct SweepResult {
  std::vector<CountReport> reports;
  CoefficientResult analytic;
};

SweepResult convergence_sweep(const StabilityCharge& sigma, const std::vector<Rational>& R_list,
                              const CountOptions& opts = {});

/// Independent oracle: exhaustive scan of an integer box derived from the
/// majorant's diagonal bounds, with membership from central_charge() and
/// primitive_decompose(). Refuses boxes above box_budget points.
CountReport brute_force_box_count(const StabilityCharge& sigma, const Rational& R, double box_budget = 1e8);

}  // namespace k3count
