#include "k3count/serialize.hpp"

#include <cmath>
#include <cstdio>

#include "k3count/errors.hpp"

namespace k3count {

namespace {

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(static_cast<long>(j.get<std::int64_t>()));
  throw InputError("expected a rational as a \"p/q\" string or an integer");
}

std::int64_t int_from_json(const Json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) {
    const Rational q = parse_rational(j.get<std::string>());
    if (q.get_den() != 1) throw InputError("expected an integer, got " + j.get<std::string>());
    return to_int64(q.get_num());
  }
  throw InputError("expected an integer");
}

IntMatrix int_matrix_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("expected a matrix");
  IntMatrix out;
  for (const auto& row : j) out.push_back(lattice_vector_from_json(row));
  return out;
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

Json to_json(const Surd& s) { return Json{{"a", to_string(s.a)}, {"b", to_string(s.b)}, {"d", to_string(s.d)}}; }

Surd surd_from_json(const Json& j) {
  return Surd(rational_from_json(require(j, "a")), rational_from_json(require(j, "b")), rational_from_json(require(j, "d")));
}

// JSON keeps every bit so reports read back unchanged; CSV uses format_double.
std::string exact_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

RationalVector rational_vector_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("expected an array of rationals");
  RationalVector out;
  for (const auto& x : j) out.push_back(rational_from_json(x));
  return out;
}

Json to_json(const RationalVector& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(to_string(x));
  return out;
}

LatticeVector lattice_vector_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("expected an array of integers");
  LatticeVector out;
  for (const auto& x : j) out.push_back(int_from_json(x));
  return out;
}

Json to_json(const IntegerLattice& L) {
  return Json{{"rank", L.rank()}, {"gram", L.gram()}, {"label", L.label()}};
}

IntegerLattice lattice_from_json(const Json& j) {
  if (j.is_string()) return standard_lattice(j.get<std::string>());
  if (!j.is_object()) throw InputError("lattice must be an object or a standard name");
  if (j.contains("name")) return standard_lattice(j.at("name").get<std::string>());
  if (j.contains("hyperbolic_sum")) return hyperbolic_sum(lattice_from_json(j.at("hyperbolic_sum")));
  IntMatrix gram = int_matrix_from_json(require(j, "gram"));
  if (j.contains("rank") && int_from_json(j.at("rank")) != static_cast<std::int64_t>(gram.size()))
    throw InputError("rank does not match the Gram matrix");
  if (gram.empty()) throw InputError("lattice rank must be positive");
  return IntegerLattice(std::move(gram), j.value("label", std::string()));
}

GLPlusElement twist_from_json(const Json& j) {
  if (j.is_null()) return GLPlusElement();
  if (!j.is_object()) throw InputError("twist must be an object");
  if (j.contains("matrix")) {
    const Json& m = j.at("matrix");
    if (!m.is_array() || m.size() != 2 || m[0].size() != 2 || m[1].size() != 2)
      throw InputError("twist matrix must be 2x2");
    Matrix2Q q;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        const Json& e = m[r][c];
        q[r][c] = e.is_number_float() ? rational_from_double(e.get<double>()) : rational_from_json(e);
      }
    std::optional<Rational> conformal;
    if (j.contains("conformal_scale_sq")) conformal = rational_from_json(j.at("conformal_scale_sq"));
    return GLPlusElement(q, conformal);
  }
  if (j.contains("scale")) return GLPlusElement::scale(rational_from_json(j.at("scale")));
  if (j.contains("rotation")) {
    const Json& r = j.at("rotation");
    if (r.contains("theta")) return GLPlusElement::rotation(r.at("theta").get<double>());
    return GLPlusElement::rotation(rational_from_json(require(r, "cos")), rational_from_json(require(r, "sin")));
  }
  if (j.contains("shear")) {
    const Json& s = j.at("shear");
    return GLPlusElement::shear(rational_from_json(require(s, "kappa")), rational_from_json(require(s, "lambda")));
  }
  if (j.empty()) return GLPlusElement();
  throw InputError("twist needs one of matrix, scale, rotation, shear");
}

Json to_json(const GLPlusElement& g) {
  Json m = Json::array();
  for (int r = 0; r < 2; ++r) m.push_back(Json::array({to_string(g.at(r, 0)), to_string(g.at(r, 1))}));
  Json out{{"matrix", m}};
  if (g.conformal_scale_sq()) out["conformal_scale_sq"] = to_string(*g.conformal_scale_sq());
  return out;
}

StabilityCharge sigma_from_json(const Json& j) {
  IntegerLattice ns(int_matrix_from_json(require(j, "ns_gram")), "NS");
  RationalVector B = rational_vector_from_json(require(j, "B"));
  LatticeVector h = lattice_vector_from_json(require(j, "omega_ray"));
  Rational t_sq = rational_from_json(require(j, "t_sq"));
  GLPlusElement twist = j.contains("twist") ? twist_from_json(j.at("twist")) : GLPlusElement();
  return StabilityCharge(std::move(ns), std::move(B), std::move(h), std::move(t_sq), std::move(twist));
}

Json to_json(const StabilityCharge& sigma) {
  Json out{{"ns_gram", sigma.ns().gram()},
           {"B", to_json(sigma.B())},
           {"omega_ray", sigma.omega_ray()},
           {"t_sq", to_string(sigma.t_sq())}};
  if (sigma.is_twisted()) out["twist"] = to_json(sigma.twist());
  return out;
}

Json to_json(const WallWitness& w) {
  return Json{{"delta", w.delta.to_string()}, {"abs_Z_sq", to_json(w.abs_sq)}, {"vanishing", w.vanishing}};
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Json to_json(const CountReport& r) {
  Json out{{"kind", r.kind},
           {"R", to_string(r.R)},
           {"total", to_string(r.total)},
           {"square_nonneg", to_string(r.square_nonneg)},
           {"spherical_multiples", to_string(r.spherical_multiples)},
           {"dimension", r.dimension},
           {"normalized", exact_double(r.normalized)}};
  out["analytic_C"] = r.analytic_C ? Json(exact_double(*r.analytic_C)) : Json(nullptr);
  const auto rel = r.rel_err();
  out["rel_err"] = rel ? Json(exact_double(*rel)) : Json(nullptr);
  Json warnings = Json::array();
  for (const auto& w : r.wall_warnings) warnings.push_back(to_json(w));
  out["wall_warnings"] = warnings;
  out["elapsed_ms"] = r.elapsed_ms;
  return out;
}

CountReport report_from_json(const Json& j) {
  CountReport r;
  r.kind = require(j, "kind").get<std::string>();
  r.R = rational_from_json(require(j, "R"));
  r.total = Integer(require(j, "total").get<std::string>());
  r.square_nonneg = Integer(require(j, "square_nonneg").get<std::string>());
  r.spherical_multiples = Integer(require(j, "spherical_multiples").get<std::string>());
  r.dimension = require(j, "dimension").get<int>();
  r.normalized = std::stod(require(j, "normalized").get<std::string>());
  if (j.contains("analytic_C") && !j.at("analytic_C").is_null())
    r.analytic_C = std::stod(j.at("analytic_C").get<std::string>());
  if (j.contains("wall_warnings")) {
    for (const auto& w : j.at("wall_warnings")) {
      const std::string text = w.at("delta").get<std::string>();
      LatticeVector coords;
      std::size_t pos = 1;
      while (pos < text.size()) {
        std::size_t end = text.find_first_of(",)", pos);
        coords.push_back(std::stoll(text.substr(pos, end - pos)));
        pos = end + 1;
      }
      r.wall_warnings.push_back(
          {MukaiVector::from_coords(coords), surd_from_json(require(w, "abs_Z_sq")), w.at("vanishing").get<bool>()});
    }
  }
  r.elapsed_ms = j.value("elapsed_ms", std::int64_t{0});
  return r;
}

Json to_json(const CoefficientResult& c) {
  Json inputs{{"rho", c.inputs.rho}, {"omega_sq", to_string(c.inputs.omega_sq)}, {"disc", to_string(c.inputs.disc)}};
  if (c.inputs.scale) inputs["scale"] = exact_double(*c.inputs.scale);
  if (c.inputs.theta) inputs["theta"] = exact_double(*c.inputs.theta);
  if (c.inputs.kappa) inputs["kappa"] = exact_double(*c.inputs.kappa);
  if (c.inputs.lambda) inputs["lambda"] = exact_double(*c.inputs.lambda);
  Json out{{"formula_id", c.formula_id}, {"value", exact_double(static_cast<double>(c.value))}, {"inputs", inputs}};
  out["quadrature_error"] =
      c.quadrature_error ? Json(exact_double(static_cast<double>(*c.quadrature_error))) : Json(nullptr);
  return out;
}

Json to_json(const VolumeEstimate& v) {
  return Json{{"estimate", exact_double(v.estimate)},
              {"stderr", exact_double(v.stderr_)},
              {"samples", v.samples},
              {"hits", v.hits},
              {"body_volume", exact_double(v.body_volume)}};
}

namespace {

ScaledVector scaled_from_json(const Json& j) {
  if (j.is_array()) return ScaledVector{rational_vector_from_json(j), Rational(1)};
  ScaledVector out{rational_vector_from_json(require(j, "direction")), Rational(1)};
  if (j.contains("scale_sq")) out.scale_sq = rational_from_json(j.at("scale_sq"));
  return out;
}

Json to_json(const ScaledVector& s) {
  return Json{{"direction", k3count::to_json(s.direction)}, {"scale_sq", to_string(s.scale_sq)}};
}

}  // namespace

SlagForm slag_form_from_json(const Json& j) {
  const IntegerLattice L = lattice_from_json(require(j, "lattice"));
  const RationalVector omega = rational_vector_from_json(require(j, "omega"));
  if (omega.size() != L.rank()) throw InputError("omega has the wrong length");
  Sublattice lag = lagrangian_lattice(L, omega);
  ScaledVector re = scaled_from_json(require(j, "re_omega"));
  ScaledVector im = scaled_from_json(require(j, "im_omega"));
  const std::string coords = j.value("coordinates", std::string("lag"));
  if (coords == "ambient") {
    if (re.direction.size() != L.rank() || im.direction.size() != L.rank())
      throw InputError("ambient Omega components must have the lattice rank");
    if (pairing(L, re.direction, omega) != 0 || pairing(L, im.direction, omega) != 0)
      throw InputError("Omega components must be orthogonal to omega");
    re.direction = lag.coordinates_of(re.direction);
    im.direction = lag.coordinates_of(im.direction);
  } else if (coords != "lag") {
    throw InputError("coordinates must be \"lag\" or \"ambient\"");
  }
  return make_slag_form(std::move(lag), std::move(re), std::move(im), rational_from_json(require(j, "k_omega")));
}

Json to_json(const SlagForm& s) {
  Json basis = Json::array();
  for (const auto& b : s.lag.basis) basis.push_back(b);
  return Json{{"lattice", to_json(s.lag.ambient)},
              {"lag_basis", basis},
              {"lag_gram", s.lag.induced.gram()},
              {"coordinates", "lag"},
              {"re_omega", to_json(s.re_omega)},
              {"im_omega", to_json(s.im_omega)},
              {"k_omega", to_string(s.k_omega)}};
}

TwistorPlane twistor_plane_from_json(const Json& j) {
  IntegerLattice L = lattice_from_json(require(j, "lattice"));
  std::vector<RationalVector> basis;
  for (const auto& b : require(j, "basis")) basis.push_back(rational_vector_from_json(b));
  return make_twistor_plane(std::move(L), std::move(basis));
}

Json to_json(const TwistorPlane& p) {
  Json basis = Json::array();
  for (const auto& b : p.basis) basis.push_back(to_json(b));
  Json gram = Json::array();
  for (const auto& row : p.gram_p) gram.push_back(to_json(row));
  return Json{{"lattice", to_json(p.ambient)}, {"basis", basis}, {"gram_p", gram}};
}

std::string csv_header() { return "R,total,square_nonneg,spherical_multiples,normalized,analytic_C,rel_err,elapsed_ms"; }

std::string csv_row(const CountReport& r) {
  const auto rel = r.rel_err();
  return to_string(r.R) + "," + to_string(r.total) + "," + to_string(r.square_nonneg) + "," +
         to_string(r.spherical_multiples) + "," + format_double(r.normalized) + "," +
         (r.analytic_C ? format_double(*r.analytic_C) : std::string()) + "," +
         (rel ? format_double(*rel) : std::string()) + "," + std::to_string(r.elapsed_ms);
}

}  // namespace k3count
