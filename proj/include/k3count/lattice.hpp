#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "k3count/rational.hpp"

namespace k3count {

using LatticeVector = IntVector;

/// Free Z-module of finite rank with an integral symmetric bilinear form.
/// Degenerate forms are allowed here; callers that need nondegeneracy check it.
class IntegerLattice {
 public:
  IntegerLattice() = default;
  IntegerLattice(IntMatrix gram, std::string label);

  std::size_t rank() const { return gram_.size(); }
  const IntMatrix& gram() const { return gram_; }
  std::int64_t gram(std::size_t i, std::size_t j) const { return gram_[i][j]; }
  const std::string& label() const { return label_; }

  bool is_even() const;

  friend bool operator==(const IntegerLattice& a, const IntegerLattice& b) { return a.gram_ == b.gram_; }

 private:
  IntMatrix gram_;
  std::string label_;
};

struct Signature {
  int plus = 0;
  int minus = 0;
  int zero = 0;

  friend bool operator==(const Signature&, const Signature&) = default;
};

std::string to_string(const Signature& s);

Integer pairing(const IntegerLattice& L, const LatticeVector& u, const LatticeVector& v);
Rational pairing(const IntegerLattice& L, const RationalVector& u, const RationalVector& v);
Integer square(const IntegerLattice& L, const LatticeVector& v);

/// gram * v as a rational row (the linear functional x -> (v, x)).
RationalVector pairing_row(const IntegerLattice& L, const RationalVector& v);

/// Exact congruence diagonalisation over Q; never touches floating point.
Signature signature(const IntegerLattice& L);
Signature signature(const RationalMatrix& symmetric);

Integer discriminant(const IntegerLattice& L);
Rational determinant(const RationalMatrix& m);

/// Pivots of the exact LDL^T of a symmetric matrix without row exchanges.
/// Returns false when a zero pivot appears.
bool ldl_pivots(const RationalMatrix& symmetric, RationalVector& pivots);
bool is_positive_definite(const RationalMatrix& symmetric);

IntegerLattice hyperbolic_plane();
IntegerLattice negative_e8();
IntegerLattice direct_sum(const std::vector<IntegerLattice>& parts, std::string label);
IntegerLattice diagonal_lattice(const IntVector& diag, std::string label = {});

/// U^3 + (-E8)^2 with the three U blocks first.
IntegerLattice k3_lattice();

/// H^0 + NS + H^4 with coordinates (r, D_1..D_rho, s) and
/// <(r1,D1,s1),(r2,D2,s2)> = D1.D2 - r1 s2 - r2 s1.
IntegerLattice hyperbolic_sum(const IntegerLattice& ns);

/// hyperbolic_sum(k3_lattice()): signature (4, 20).
IntegerLattice mukai_lattice();

/// "U", "E8_negative", "K3", "Mukai".
IntegerLattice standard_lattice(std::string_view name);

/// A saturated subgroup of an ambient lattice with its induced form.
struct Sublattice {
  IntegerLattice ambient;
  std::vector<LatticeVector> basis;
  IntegerLattice induced;
  bool degenerate_direction = false;  // set when the defining functional vanished

  std::size_t rank() const { return basis.size(); }
  LatticeVector to_ambient(const LatticeVector& coords) const;
  RationalVector to_ambient(const RationalVector& coords) const;
  /// Coordinates of an ambient vector lying in the rational span of the basis.
  RationalVector coordinates_of(const RationalVector& ambient_vector) const;
};

/// Basis of the saturated kernel {x in Z^n : M x = 0}.
std::vector<LatticeVector> integer_kernel(const std::vector<std::vector<Integer>>& relations, std::size_t n);

/// Lattice vectors v with (v, w) = 0.
Sublattice orthogonal_complement(const IntegerLattice& L, const RationalVector& w);

struct PrimitiveDecomposition {
  std::int64_t multiplicity;
  LatticeVector primitive;
};

PrimitiveDecomposition primitive_decompose(const LatticeVector& v);

/// Real solution of A x = b for square nonsingular rational A.
RationalVector solve(const RationalMatrix& a, const RationalVector& b);
RationalMatrix inverse(const RationalMatrix& a);

struct OrthobasisExtension {
  std::vector<Eigen::VectorXd> plane_orthonormal;  // Gram-Schmidt of the input vectors
  std::vector<Eigen::VectorXd> w_basis;            // <w_i, w_j> = -delta_ij
  double det_A = 0.0;                              // basis (inputs..., w...) relative to the standard one
  double det_normalized = 0.0;                     // basis (plane_orthonormal..., w...)
};

Eigen::MatrixXd to_eigen(const IntMatrix& m);

/// Completes vectors spanning a positive definite subspace by a (-1)-orthonormal
/// basis of its orthogonal complement, which must be negative definite.
OrthobasisExtension orthobasis_extension(const IntegerLattice& L, const std::vector<Eigen::VectorXd>& positive_vectors);
OrthobasisExtension orthobasis_extension(const IntegerLattice& L, const RationalVector& re_phi,
                                         const RationalVector& im_phi);

}  // namespace k3count
