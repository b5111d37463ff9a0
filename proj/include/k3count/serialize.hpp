#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "k3count/analytic.hpp"
#include "k3count/charge.hpp"
#include "k3count/counting.hpp"
#include "k3count/lattice.hpp"
#include "k3count/slag.hpp"

namespace k3count {

using Json = nlohmann::ordered_json;

/// {"rank": n, "gram": [[...]], "label": "..."}; also {"name": "K3"} and
/// {"hyperbolic_sum": <lattice>} on input.
Json to_json(const IntegerLattice& L);
IntegerLattice lattice_from_json(const Json& j);

RationalVector rational_vector_from_json(const Json& j);
Json to_json(const RationalVector& v);
LatticeVector lattice_vector_from_json(const Json& j);

/// {"matrix": [[a, b], [c, d]], "conformal_scale_sq": "1"} or one of
/// {"scale": "2"}, {"rotation": {"cos": "3/5", "sin": "4/5"}},
/// {"rotation": {"theta": 0.5}}, {"shear": {"kappa": "1", "lambda": "2"}}.
GLPlusElement twist_from_json(const Json& j);
Json to_json(const GLPlusElement& g);

/// {"ns_gram", "B", "omega_ray", "t_sq", "twist"}.
StabilityCharge sigma_from_json(const Json& j);
Json to_json(const StabilityCharge& sigma);

Json to_json(const CountReport& report);
CountReport report_from_json(const Json& j);
Json to_json(const CoefficientResult& c);
Json to_json(const VolumeEstimate& v);
Json to_json(const WallWitness& w);

/// {"lattice", "omega", "re_omega": {"direction", "scale_sq"}, "im_omega", "k_omega",
///  "coordinates": "lag" | "ambient"}.
SlagForm slag_form_from_json(const Json& j);
Json to_json(const SlagForm& s);

/// {"lattice", "basis": [[...], ...]}.
TwistorPlane twistor_plane_from_json(const Json& j);
Json to_json(const TwistorPlane& p);

/// Twelve significant digits, independent of the locale.
std::string format_double(double x);

std::string csv_header();
std::string csv_row(const CountReport& report);

}  // namespace k3count
