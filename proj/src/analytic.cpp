#include "k3count/analytic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <queue>
#include <random>
#include <thread>

#include "k3count/errors.hpp"

namespace k3count {

namespace {

constexpr long double kPi = std::numbers::pi_v<long double>;

// 53-bit conversion; every caller needs at most double precision in the inputs.
long double to_long_double(const Rational& q) { return static_cast<long double>(q.get_d()); }

Integer factorial(std::int64_t n) {
  Integer out;
  mpz_fac_ui(out.get_mpz_t(), static_cast<unsigned long>(n));
  return out;
}

long double double_factorial_ratio(int j) {
  // (j-1)!! / j!! for even j.
  long double out = 1.0L;
  for (int i = 1; i < j; i += 2) out *= static_cast<long double>(i) / static_cast<long double>(i + 1);
  return out;
}

long double binomial(int n, int k) {
  long double out = 1.0L;
  for (int i = 1; i <= k; ++i) out = out * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  return out;
}

}  // namespace

long double GammaHalf::value() const {
  const long double c = to_long_double(coefficient);
  return has_sqrt_pi ? c * std::sqrt(kPi) : c;
}

std::string GammaHalf::to_string() const {
  return k3count::to_string(coefficient) + (has_sqrt_pi ? "*sqrt(pi)" : "");
}

GammaHalf gamma_half(std::int64_t n) {
  if (n <= 0) throw InputError("gamma_half needs n >= 1");
  GammaHalf out;
  if (n % 2 == 0) {
    out.coefficient = factorial(n / 2 - 1);
    out.has_sqrt_pi = false;
  } else {
    // Gamma(k + 1/2) = (2k)! / (4^k k!) sqrt(pi).
    const std::int64_t k = (n - 1) / 2;
    Integer four_k;
    mpz_ui_pow_ui(four_k.get_mpz_t(), 4, static_cast<unsigned long>(k));
    out.coefficient = Rational(factorial(2 * k), four_k * factorial(k));
    out.coefficient.canonicalize();
    out.has_sqrt_pi = true;
  }
  return out;
}

long double ball_volume(int rho, long double r) {
  if (rho < 0) throw InputError("ball dimension must be nonnegative");
  if (r < 0) throw InputError("radius must be nonnegative");
  if (rho == 0) return 1.0L;
  return std::pow(kPi, rho / 2.0L) * std::pow(r, static_cast<long double>(rho)) / gamma_half(rho + 2).value();
}

CoefficientResult coefficient_phase1(int rho, const Rational& omega_sq, const Integer& disc) {
  if (rho < 1) throw InputError("rho must be positive");
  if (omega_sq <= 0) throw InputError("omega^2 must be positive");
  if (disc == 0) throw InputError("discriminant must be nonzero");
  const long double half_dim = (rho + 2) / 2.0L;
  const long double w = to_long_double(omega_sq);
  const long double d = std::fabs(static_cast<long double>(disc.get_d()));
  CoefficientResult out;
  out.value = 2.0L * std::pow(kPi, half_dim) /
              ((rho + 2) * gamma_half(rho + 2).value() * std::pow(w, half_dim) * std::sqrt(d));
  out.formula_id = "phase1";
  out.inputs.rho = rho;
  out.inputs.omega_sq = omega_sq;
  out.inputs.disc = disc;
  return out;
}

QuadratureResult adaptive_simpson(const std::function<long double(long double)>& f, long double a, long double b,
                                  long double tolerance, std::size_t initial, std::size_t max_intervals) {
  // Globally adaptive: always split the panel with the largest Richardson estimate.
  struct Panel {
    long double a, b, fa, fm, fb, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto simpson = [](long double a, long double b, long double fa, long double fm, long double fb) {
    return (b - a) / 6.0L * (fa + 4.0L * fm + fb);
  };
  auto make = [&](long double pa, long double pb, long double fa, long double fm, long double fb) {
    const long double m = (pa + pb) / 2.0L;
    const long double flm = f((pa + m) / 2.0L), frm = f((m + pb) / 2.0L);
    const long double whole = simpson(pa, pb, fa, fm, fb);
    const long double halves = simpson(pa, m, fa, flm, fm) + simpson(m, pb, fm, frm, fb);
    const long double delta = halves - whole;
    return Panel{pa, pb, fa, fm, fb, halves + delta / 15.0L, std::fabs(delta) / 15.0L};
  };
  initial = std::max<std::size_t>(initial, 1);
  max_intervals = std::max(max_intervals, initial);
  std::priority_queue<Panel> heap;
  long double error = 0.0L;
  for (std::size_t i = 0; i < initial; ++i) {
    const long double pa = a + (b - a) * static_cast<long double>(i) / static_cast<long double>(initial);
    const long double pb = a + (b - a) * static_cast<long double>(i + 1) / static_cast<long double>(initial);
    const Panel p = make(pa, pb, f(pa), f((pa + pb) / 2.0L), f(pb));
    error += p.error;
    heap.push(p);
  }
  while (error > tolerance && heap.size() < max_intervals) {
    const Panel p = heap.top();
    heap.pop();
    const long double m = (p.a + p.b) / 2.0L;
    const Panel left = make(p.a, m, p.fa, f((p.a + m) / 2.0L), p.fm);
    const Panel right = make(m, p.b, p.fm, f((m + p.b) / 2.0L), p.fb);
    error += left.error + right.error - p.error;
    heap.push(left);
    heap.push(right);
  }
  QuadratureResult out;
  out.intervals = heap.size();
  for (; !heap.empty(); heap.pop()) {
    out.value += heap.top().value;
    out.error += heap.top().error;
  }
  return out;
}

QuadratureResult shear_integral(int rho, long double kappa, long double lambda, long double tolerance) {
  if (!(lambda > 0)) throw InputError("shear needs lambda > 0");
  const long double inv_l2 = 1.0L / (lambda * lambda);
  const long double exponent = rho / 2.0L;
  auto f = [&](long double t) {
    const long double c = std::cos(t), s = std::sin(t);
    const long double u = s - kappa * c;
    return std::pow(c * c + u * u * inv_l2, exponent);
  };
  return adaptive_simpson(f, 0.0L, 2.0L * kPi, tolerance);
}

long double shear_integral_even_exact(int rho, long double kappa, long double lambda) {
  if (rho < 0 || rho % 2 != 0) throw InputError("closed form needs even rho");
  if (!(lambda > 0)) throw InputError("shear needs lambda > 0");
  const long double l2 = lambda * lambda;
  const long double A = 1.0L + kappa * kappa / l2;
  const long double B = -kappa / l2;
  const long double C = 1.0L / l2;
  // q = m + r cos(2t - phi).
  const long double m = (A + C) / 2.0L;
  const long double r = std::hypot((A - C) / 2.0L, B);
  const int k = rho / 2;
  long double sum = 0.0L;
  for (int j = 0; j <= k; j += 2) {
    sum += binomial(k, j) * std::pow(m, static_cast<long double>(k - j)) * std::pow(r, static_cast<long double>(j)) *
           double_factorial_ratio(j);
  }
  return 2.0L * kPi * sum;
}

CoefficientResult coefficient_gl(const CoefficientResult& base, const GLDecomposition& d) {
  if (!(d.lambda > 0)) throw InputError("shear needs lambda > 0");
  if (!(d.scale > 0)) throw InputError("scale must be positive");
  CoefficientResult out = base;
  const int rho = base.inputs.rho;
  const bool sheared = std::fabs(d.kappa) > 1e-15 || std::fabs(d.lambda - 1.0) > 1e-15;
  const bool scaled = std::fabs(d.scale - 1.0) > 1e-15;
  const bool rotated = d.theta > 1e-15 && std::fabs(d.theta - 2.0 * std::numbers::pi) > 1e-15;
  long double factor = 1.0L;
  if (sheared) {
    const QuadratureResult q = shear_integral(rho, d.kappa, d.lambda);
    factor = q.value / (2.0L * kPi * d.lambda);
    out.quadrature_error = base.value * q.error / (2.0L * kPi * d.lambda);
    out.formula_id = "shear";
  } else if (scaled) {
    out.formula_id = "scale";
  } else if (rotated) {
    out.formula_id = "rotation";
  }
  factor /= std::pow(static_cast<long double>(d.scale), static_cast<long double>(rho + 2));
  out.value = base.value * factor;
  if (out.quadrature_error) *out.quadrature_error /= std::pow(static_cast<long double>(d.scale), rho + 2.0L);
  out.inputs.scale = d.scale;
  out.inputs.theta = d.theta;
  out.inputs.kappa = d.kappa;
  out.inputs.lambda = d.lambda;
  return out;
}

CoefficientResult coefficient_gl(const CoefficientResult& base, const GLPlusElement& g) {
  return coefficient_gl(base, decompose_gl(g));
}

CoefficientResult coefficient_for(const StabilityCharge& sigma) {
  const CoefficientResult base =
      coefficient_phase1(static_cast<int>(sigma.rho()), sigma.omega_sq(), discriminant(sigma.ns()));
  if (!sigma.is_twisted()) return base;
  return coefficient_gl(base, sigma.twist());
}

CoefficientResult coefficient_slag(const Rational& k_omega, const Integer& disc_lag) {
  return coefficient_slag_general(21, k_omega, disc_lag);
}

CoefficientResult coefficient_slag_general(int rank_lag, const Rational& k_omega, const Integer& disc_lag) {
  if (rank_lag < 3) throw InputError("Lagrangian lattice rank must be at least 3");
  CoefficientResult out = coefficient_phase1(rank_lag - 2, k_omega, disc_lag);
  out.formula_id = "slag";
  return out;
}

RegionSpec stability_region(const StabilityCharge& sigma) {
  RegionSpec out;
  out.kind = "stability";
  out.lattice = sigma.mukai();
  const auto re = to_double(sigma.re_phi());
  const auto im = sigma.im_phi();
  out.plane = {Eigen::Map<const Eigen::VectorXd>(re.data(), static_cast<Eigen::Index>(re.size())),
               Eigen::Map<const Eigen::VectorXd>(im.data(), static_cast<Eigen::Index>(im.size()))};
  const Matrix2Q m = sigma.twist().norm_matrix();
  out.norm = Eigen::MatrixXd(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.norm(i, j) = m[i][j].get_d();
  return out;
}

RegionSpec seminorm_region(const IntegerLattice& lattice, const std::vector<Eigen::VectorXd>& plane) {
  if (plane.empty()) throw InputError("plane needs at least one vector");
  const Eigen::MatrixXd g = to_eigen(lattice.gram());
  const auto m = static_cast<Eigen::Index>(plane.size());
  Eigen::MatrixXd gp(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) gp(i, j) = plane[i].dot(g * plane[j]);
  Eigen::LLT<Eigen::MatrixXd> llt(gp);
  if (llt.info() != Eigen::Success) throw InputError("plane is not positive definite");
  RegionSpec out;
  out.kind = "seminorm";
  out.lattice = lattice;
  out.plane = plane;
  out.norm = gp.inverse();
  return out;
}

namespace {

constexpr std::uint64_t kChunk = std::uint64_t{1} << 16;

class ChunkStream {
 public:
  ChunkStream(std::uint64_t seed, std::uint64_t chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
    engine_.seed(seq);
  }
  /// Uniform in (0, 1].
  double uniform() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double t = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

void sample_ball(ChunkStream& rng, double radius, Eigen::VectorXd& out) {
  const auto k = out.size();
  if (k == 0) return;
  for (Eigen::Index i = 0; i < k; ++i) out(i) = rng.normal();
  const double len = out.norm();
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(k));
  out *= r / len;
}

}  // namespace

VolumeEstimate mc_volume(const RegionSpec& region, std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  if (samples == 0) throw InputError("samples must be positive");
  const std::size_t n = region.lattice.rank();
  const std::size_t m = region.plane.size();
  if (m == 0 || m > n) throw InputError("degenerate bounding body: bad plane dimension");
  if (region.norm.rows() != static_cast<Eigen::Index>(m) || region.norm.cols() != static_cast<Eigen::Index>(m))
    throw InputError("norm matrix does not match the plane");
  const OrthobasisExtension ext = orthobasis_extension(region.lattice, region.plane);
  const Eigen::MatrixXd g = to_eigen(region.lattice.gram());

  Eigen::MatrixXd u(n, m), w(n, n - m), p(n, m);
  for (std::size_t k = 0; k < m; ++k) {
    u.col(static_cast<Eigen::Index>(k)) = ext.plane_orthonormal[k];
    p.col(static_cast<Eigen::Index>(k)) = region.plane[k];
  }
  for (std::size_t k = 0; k < n - m; ++k) w.col(static_cast<Eigen::Index>(k)) = ext.w_basis[k];
  const Eigen::MatrixXd pg = p.transpose() * g;  // b = pg * x
  const Eigen::MatrixXd t = pg * u;
  const Eigen::MatrixXd k_form = t.transpose() * region.norm * t;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k_form);
  const double lambda_min = eig.eigenvalues().minCoeff();
  if (!(lambda_min > 0)) throw InputError("degenerate bounding body");
  const double radius = 1.0 / std::sqrt(lambda_min);

  VolumeEstimate out;
  out.samples = samples;
  out.body_volume = std::fabs(ext.det_normalized) * static_cast<double>(ball_volume(static_cast<int>(m), radius)) *
                    static_cast<double>(ball_volume(static_cast<int>(n - m), radius));
  if (!(out.body_volume > 0)) throw InputError("degenerate bounding body");

  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> hits(chunks, 0);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    Eigen::VectorXd a(static_cast<Eigen::Index>(m)), c(static_cast<Eigen::Index>(n - m)), x, b;
    for (std::uint64_t chunk = next++; chunk < chunks; chunk = next++) {
      ChunkStream rng(seed, chunk);
      const std::uint64_t count = std::min(kChunk, samples - chunk * kChunk);
      std::uint64_t local = 0;
      for (std::uint64_t s = 0; s < count; ++s) {
        sample_ball(rng, radius, a);
        sample_ball(rng, radius, c);
        x = u * a + w * c;
        if (x.dot(g * x) < 0.0) continue;
        b = pg * x;
        if (b.dot(region.norm * b) <= 1.0) ++local;
      }
      hits[chunk] = local;
    }
  };
  const unsigned pool_size = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
  if (pool_size == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < pool_size; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto h : hits) out.hits += h;
  const double frac = static_cast<double>(out.hits) / static_cast<double>(samples);
  out.estimate = out.body_volume * frac;
  out.stderr_ = out.body_volume * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples));
  return out;
}

}  // namespace k3count
