#include "k3count/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "k3count/errors.hpp"

namespace k3count {

IntegerLattice::IntegerLattice(IntMatrix gram, std::string label) : gram_(std::move(gram)), label_(std::move(label)) {
  const std::size_t n = gram_.size();
  if (n == 0) throw InputError("lattice rank must be positive");
  for (const auto& row : gram_) {
    if (row.size() != n) throw InputError("gram matrix is not square");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (gram_[i][j] != gram_[j][i]) throw InputError("gram matrix is not symmetric");
    }
  }
}

bool IntegerLattice::is_even() const {
  for (std::size_t i = 0; i < rank(); ++i) {
    if (gram_[i][i] % 2 != 0) return false;
  }
  return true;
}

std::string to_string(const Signature& s) {
  return "(" + std::to_string(s.plus) + "," + std::to_string(s.minus) + "," + std::to_string(s.zero) + ")";
}

namespace {

void check_length(const IntegerLattice& L, std::size_t len) {
  if (len != L.rank()) {
    throw InputError("vector length " + std::to_string(len) + " does not match lattice rank " +
                     std::to_string(L.rank()));
  }
}

}  // namespace

Integer pairing(const IntegerLattice& L, const LatticeVector& u, const LatticeVector& v) {
  check_length(L, u.size());
  check_length(L, v.size());
  Integer total = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0) continue;
    Integer row = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (L.gram(i, j) != 0 && v[j] != 0) row += Integer(static_cast<long>(L.gram(i, j))) * static_cast<long>(v[j]);
    }
    total += row * static_cast<long>(u[i]);
  }
  return total;
}

Rational pairing(const IntegerLattice& L, const RationalVector& u, const RationalVector& v) {
  check_length(L, u.size());
  check_length(L, v.size());
  Rational total = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0) continue;
    Rational row = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (L.gram(i, j) != 0) row += static_cast<long>(L.gram(i, j)) * v[j];
    }
    total += row * u[i];
  }
  return total;
}

Integer square(const IntegerLattice& L, const LatticeVector& v) { return pairing(L, v, v); }

RationalVector pairing_row(const IntegerLattice& L, const RationalVector& v) {
  check_length(L, v.size());
  RationalVector out(L.rank(), Rational(0));
  for (std::size_t i = 0; i < L.rank(); ++i) {
    for (std::size_t j = 0; j < L.rank(); ++j) {
      if (L.gram(i, j) != 0) out[i] += static_cast<long>(L.gram(i, j)) * v[j];
    }
  }
  return out;
}

Signature signature(const RationalMatrix& symmetric) {
  RationalMatrix a = symmetric;
  const std::size_t n = a.size();
  Signature sig;
  auto swap_index = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    std::swap(a[i], a[j]);
    for (auto& row : a) std::swap(row[i], row[j]);
  };
  std::size_t k = 0;
  for (; k < n; ++k) {
    std::size_t pivot = n;
    for (std::size_t i = k; i < n; ++i) {
      if (a[i][i] != 0) {
        pivot = i;
        break;
      }
    }
    if (pivot == n) {
      // Zero diagonal: a nonzero off-diagonal entry (i, j) gives a nonzero
      // diagonal 2 a_ij after the congruence e_i -> e_i + e_j.
      std::size_t pi = n, pj = n;
      for (std::size_t i = k; i < n && pi == n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (a[i][j] != 0) {
            pi = i;
            pj = j;
            break;
          }
        }
      }
      if (pi == n) break;
      for (std::size_t c = 0; c < n; ++c) a[pi][c] += a[pj][c];
      for (std::size_t r = 0; r < n; ++r) a[r][pi] += a[r][pj];
      pivot = pi;
    }
    swap_index(k, pivot);
    const Rational p = a[k][k];
    if (p > 0) {
      ++sig.plus;
    } else {
      ++sig.minus;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a[i][k] == 0) continue;
      const Rational f = a[i][k] / p;
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] -= f * a[k][j];
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      a[i][k] = 0;
      a[k][i] = 0;
    }
  }
  sig.zero = static_cast<int>(n) - sig.plus - sig.minus;
  return sig;
}

Signature signature(const IntegerLattice& L) { return signature(to_rational(L.gram())); }

Rational determinant(const RationalMatrix& m) {
  RationalMatrix a = m;
  const std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    while (pivot < n && a[pivot][k] == 0) ++pivot;
    if (pivot == n) return Rational(0);
    if (pivot != k) {
      std::swap(a[pivot], a[k]);
      det = -det;
    }
    det *= a[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a[i][k] == 0) continue;
      const Rational f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return det;
}

Integer discriminant(const IntegerLattice& L) {
  // Bareiss fraction-free elimination.
  const std::size_t n = L.rank();
  std::vector<std::vector<Integer>> a(n, std::vector<Integer>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = static_cast<long>(L.gram(i, j));
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && a[swap_row][k] == 0) ++swap_row;
      if (swap_row == n) return Integer(0);
      std::swap(a[k], a[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      }
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

bool ldl_pivots(const RationalMatrix& symmetric, RationalVector& pivots) {
  RationalMatrix a = symmetric;
  const std::size_t n = a.size();
  pivots.assign(n, Rational(0));
  for (std::size_t k = 0; k < n; ++k) {
    pivots[k] = a[k][k];
    if (a[k][k] == 0) return false;
    for (std::size_t i = k + 1; i < n; ++i) {
      const Rational f = a[i][k] / a[k][k];
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return true;
}

bool is_positive_definite(const RationalMatrix& symmetric) {
  RationalVector pivots;
  if (!ldl_pivots(symmetric, pivots)) return false;
  return std::all_of(pivots.begin(), pivots.end(), [](const Rational& p) { return p > 0; });
}

IntegerLattice hyperbolic_plane() { return IntegerLattice({{0, 1}, {1, 0}}, "U"); }

IntegerLattice negative_e8() {
  // Bourbaki labelling: chain 1-3-4-5-6-7-8 with node 2 attached to node 4.
  static constexpr std::pair<int, int> kEdges[] = {{0, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {1, 3}};
  IntMatrix g(8, IntVector(8, 0));
  for (int i = 0; i < 8; ++i) g[i][i] = -2;
  for (auto [i, j] : kEdges) {
    g[i][j] = 1;
    g[j][i] = 1;
  }
  return IntegerLattice(std::move(g), "E8_negative");
}

IntegerLattice direct_sum(const std::vector<IntegerLattice>& parts, std::string label) {
  std::size_t n = 0;
  for (const auto& p : parts) n += p.rank();
  IntMatrix g(n, IntVector(n, 0));
  std::size_t offset = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p.rank(); ++i)
      for (std::size_t j = 0; j < p.rank(); ++j) g[offset + i][offset + j] = p.gram(i, j);
    offset += p.rank();
  }
  return IntegerLattice(std::move(g), std::move(label));
}

IntegerLattice diagonal_lattice(const IntVector& diag, std::string label) {
  IntMatrix g(diag.size(), IntVector(diag.size(), 0));
  for (std::size_t i = 0; i < diag.size(); ++i) g[i][i] = diag[i];
  if (label.empty()) {
    label = "diag(";
    for (std::size_t i = 0; i < diag.size(); ++i) label += (i ? "," : "") + std::to_string(diag[i]);
    label += ")";
  }
  return IntegerLattice(std::move(g), std::move(label));
}

IntegerLattice k3_lattice() {
  const auto u = hyperbolic_plane();
  const auto e8 = negative_e8();
  return direct_sum({u, u, u, e8, e8}, "K3");
}

IntegerLattice hyperbolic_sum(const IntegerLattice& ns) {
  const std::size_t rho = ns.rank();
  if (rho == 0) throw InputError("hyperbolic_sum requires rank(NS) >= 1");
  if (discriminant(ns) == 0) throw InputError("hyperbolic_sum requires a nondegenerate NS lattice");
  const std::size_t n = rho + 2;
  IntMatrix g(n, IntVector(n, 0));
  g[0][n - 1] = -1;
  g[n - 1][0] = -1;
  for (std::size_t i = 0; i < rho; ++i)
    for (std::size_t j = 0; j < rho; ++j) g[i + 1][j + 1] = ns.gram(i, j);
  return IntegerLattice(std::move(g), "H0+" + ns.label() + "+H4");
}

IntegerLattice mukai_lattice() {
  auto m = hyperbolic_sum(k3_lattice());
  return IntegerLattice(m.gram(), "Mukai");
}

IntegerLattice standard_lattice(std::string_view name) {
  if (name == "U") return hyperbolic_plane();
  if (name == "E8_negative") return negative_e8();
  if (name == "K3") return k3_lattice();
  if (name == "Mukai") return mukai_lattice();
  throw InputError("unknown standard lattice '" + std::string(name) + "'");
}

LatticeVector Sublattice::to_ambient(const LatticeVector& coords) const {
  if (coords.size() != basis.size()) throw InputError("sublattice coordinate length mismatch");
  LatticeVector out(ambient.rank(), 0);
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += coords[k] * basis[k][i];
  return out;
}

RationalVector Sublattice::to_ambient(const RationalVector& coords) const {
  if (coords.size() != basis.size()) throw InputError("sublattice coordinate length mismatch");
  RationalVector out(ambient.rank(), Rational(0));
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += coords[k] * static_cast<long>(basis[k][i]);
  return out;
}

RationalVector Sublattice::coordinates_of(const RationalVector& v) const {
  const std::size_t n = ambient.rank();
  const std::size_t k = basis.size();
  if (v.size() != n) throw InputError("ambient vector length mismatch");
  // Row-reduce the augmented n x (k+1) system [B | v].
  RationalMatrix a(n, RationalVector(k + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) a[i][c] = static_cast<long>(basis[c][i]);
    a[i][k] = v[i];
  }
  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t c = 0; c < k && row < n; ++c) {
    std::size_t p = row;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) continue;
    std::swap(a[p], a[row]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == row || a[i][c] == 0) continue;
      const Rational f = a[i][c] / a[row][c];
      for (std::size_t j = c; j <= k; ++j) a[i][j] -= f * a[row][j];
    }
    pivot_cols.push_back(c);
    ++row;
  }
  for (std::size_t i = row; i < n; ++i) {
    if (a[i][k] != 0) throw InputError("vector is not in the span of the sublattice");
  }
  RationalVector x(k, Rational(0));
  for (std::size_t r = 0; r < pivot_cols.size(); ++r) x[pivot_cols[r]] = a[r][k] / a[r][pivot_cols[r]];
  return x;
}

std::vector<LatticeVector> integer_kernel(const std::vector<std::vector<Integer>>& relations, std::size_t n) {
  // Unimodular column operations bring the relation matrix to echelon form;
  // the transform's columns beyond the last pivot span the saturated kernel.
  std::vector<std::vector<Integer>> m = relations;
  std::vector<std::vector<Integer>> u(n, std::vector<Integer>(n, 0));
  for (std::size_t i = 0; i < n; ++i) u[i][i] = 1;
  auto column_axpy = [&](std::size_t dst, std::size_t src, const Integer& f) {
    for (auto& row : m) row[dst] -= f * row[src];
    for (auto& row : u) row[dst] -= f * row[src];
  };
  auto column_swap = [&](std::size_t a, std::size_t b) {
    for (auto& row : m) std::swap(row[a], row[b]);
    for (auto& row : u) std::swap(row[a], row[b]);
  };
  std::size_t pivot = 0;
  for (std::size_t r = 0; r < m.size() && pivot < n; ++r) {
    while (true) {
      std::size_t best = n;
      for (std::size_t c = pivot; c < n; ++c) {
        if (m[r][c] != 0 && (best == n || abs(m[r][c]) < abs(m[r][best]))) best = c;
      }
      if (best == n) break;
      column_swap(pivot, best);
      bool done = true;
      for (std::size_t c = pivot + 1; c < n; ++c) {
        if (m[r][c] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), m[r][c].get_mpz_t(), m[r][pivot].get_mpz_t());
        column_axpy(c, pivot, q);
        if (m[r][c] != 0) done = false;
      }
      if (done) {
        ++pivot;
        break;
      }
    }
  }
  std::vector<LatticeVector> kernel;
  for (std::size_t c = pivot; c < n; ++c) {
    LatticeVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = to_int64(u[i][c]);
    const auto first = std::find_if(v.begin(), v.end(), [](std::int64_t x) { return x != 0; });
    if (first != v.end() && *first < 0) {
      for (auto& x : v) x = -x;
    }
    kernel.push_back(std::move(v));
  }
  return kernel;
}

namespace {

IntegerLattice induced_lattice(const IntegerLattice& L, const std::vector<LatticeVector>& basis, std::string label) {
  const std::size_t k = basis.size();
  IntMatrix g(k, IntVector(k, 0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) g[i][j] = to_int64(pairing(L, basis[i], basis[j]));
  return IntegerLattice(std::move(g), std::move(label));
}

}  // namespace

Sublattice orthogonal_complement(const IntegerLattice& L, const RationalVector& w) {
  check_length(L, w.size());
  if (std::all_of(w.begin(), w.end(), [](const Rational& x) { return x == 0; }))
    throw InputError("orthogonal_complement of the zero vector");
  const RationalVector row = pairing_row(L, w);
  Integer den = 1;
  for (const auto& x : row) den = lcm(den, x.get_den());
  std::vector<Integer> relation;
  relation.reserve(row.size());
  for (const auto& x : row) relation.push_back(Integer(x * den));

  Sublattice out;
  out.ambient = L;
  if (std::all_of(relation.begin(), relation.end(), [](const Integer& x) { return x == 0; })) {
    out.degenerate_direction = true;
    for (std::size_t i = 0; i < L.rank(); ++i) {
      LatticeVector e(L.rank(), 0);
      e[i] = 1;
      out.basis.push_back(std::move(e));
    }
  } else {
    out.basis = integer_kernel({relation}, L.rank());
  }
  out.induced = induced_lattice(L, out.basis, L.label() + "^perp");
  return out;
}

PrimitiveDecomposition primitive_decompose(const LatticeVector& v) {
  std::int64_t g = 0;
  for (auto x : v) g = std::gcd(g, x < 0 ? -x : x);
  if (g == 0) throw InputError("primitive_decompose of the zero vector");
  PrimitiveDecomposition out{g, v};
  for (auto& x : out.primitive) x /= g;
  return out;
}

RationalVector solve(const RationalMatrix& a_in, const RationalVector& b) {
  const std::size_t n = a_in.size();
  RationalMatrix a = a_in;
  RationalVector x = b;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a[p][k] == 0) ++p;
    if (p == n) throw InputError("singular linear system");
    std::swap(a[p], a[k]);
    std::swap(x[p], x[k]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || a[i][k] == 0) continue;
      const Rational f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      x[i] -= f * x[k];
    }
  }
  for (std::size_t i = 0; i < n; ++i) x[i] /= a[i][i];
  return x;
}

RationalMatrix inverse(const RationalMatrix& a) {
  const std::size_t n = a.size();
  RationalMatrix inv(n, RationalVector(n));
  for (std::size_t c = 0; c < n; ++c) {
    RationalVector e(n, Rational(0));
    e[c] = 1;
    const auto col = solve(a, e);
    for (std::size_t r = 0; r < n; ++r) inv[r][c] = col[r];
  }
  return inv;
}

Eigen::MatrixXd to_eigen(const IntMatrix& m) {
  Eigen::MatrixXd out(m.size(), m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) out(i, j) = static_cast<double>(m[i][j]);
  return out;
}

OrthobasisExtension orthobasis_extension(const IntegerLattice& L, const std::vector<Eigen::VectorXd>& positive_vectors) {
  const auto n = static_cast<Eigen::Index>(L.rank());
  const auto m = static_cast<Eigen::Index>(positive_vectors.size());
  if (m == 0 || m > n) throw InputError("orthobasis_extension needs between 1 and rank vectors");
  const Eigen::MatrixXd g = to_eigen(L.gram());
  Eigen::MatrixXd p(n, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (positive_vectors[i].size() != n) throw InputError("plane vector length mismatch");
    p.col(i) = positive_vectors[i];
  }
  const Eigen::MatrixXd plane_gram = p.transpose() * g * p;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(plane_gram);
  if (eig.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff()))
    throw InputError("plane vectors do not span a positive definite subspace");

  OrthobasisExtension out;
  auto pairing_d = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.dot(g * b); };
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::VectorXd u = p.col(i);
    for (const auto& prev : out.plane_orthonormal) u -= pairing_d(u, prev) * prev;
    out.plane_orthonormal.push_back(u / std::sqrt(pairing_d(u, u)));
  }

  // Euclidean kernel of x -> (p_i, x), then Gram-Schmidt for the form -g.
  const Eigen::MatrixXd functionals = p.transpose() * g;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(functionals, Eigen::ComputeFullV);
  const Eigen::MatrixXd v = svd.matrixV();
  for (Eigen::Index c = m; c < n; ++c) {
    Eigen::VectorXd w = v.col(c);
    for (const auto& prev : out.w_basis) w += pairing_d(w, prev) * prev;
    const double norm = -pairing_d(w, w);
    if (norm <= 1e-12) throw InputError("orthogonal complement of the plane is not negative definite");
    out.w_basis.push_back(w / std::sqrt(norm));
  }

  Eigen::MatrixXd basis(n, n), normalized(n, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    basis.col(i) = p.col(i);
    normalized.col(i) = out.plane_orthonormal[i];
  }
  for (Eigen::Index j = 0; j < n - m; ++j) {
    basis.col(m + j) = out.w_basis[j];
    normalized.col(m + j) = out.w_basis[j];
  }
  out.det_A = std::abs(basis.determinant());
  out.det_normalized = std::abs(normalized.determinant());
  return out;
}

OrthobasisExtension orthobasis_extension(const IntegerLattice& L, const RationalVector& re_phi,
                                         const RationalVector& im_phi) {
  const auto a = to_double(re_phi);
  const auto b = to_double(im_phi);
  return orthobasis_extension(
      L, {Eigen::Map<const Eigen::VectorXd>(a.data(), a.size()), Eigen::Map<const Eigen::VectorXd>(b.data(), b.size())});
}

}  // namespace k3count
