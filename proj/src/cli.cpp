#include "k3count/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "k3count/errors.hpp"

namespace k3count {

namespace {

constexpr int kSchemaVersion = 1;

std::string one_line(std::string text) {
  for (auto& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
    if (c == '"') c = '\'';
  }
  return text;
}

std::int64_t require_int(const Json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
  const Json& v = j.at(key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_string()) {
    const Rational q = parse_rational(v.get<std::string>());
    if (q.get_den() != 1) throw InputError(std::string("field \"") + key + "\" must be an integer");
    return to_int64(q.get_num());
  }
  throw InputError(std::string("field \"") + key + "\" must be an integer");
}

Json load_config(const RunConfig& rc) {
  Json cfg;
  if (rc.config) {
    cfg = *rc.config;
  } else {
    if (rc.config_path.empty()) throw InputError("no config given");
    std::ifstream in(rc.config_path);
    if (!in) throw InputError("cannot read config " + rc.config_path);
    try {
      cfg = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
  }
  if (!cfg.is_object()) throw InputError("config must be a JSON object");
  if (!cfg.contains("schema_version") || cfg.at("schema_version") != kSchemaVersion)
    throw InputError("config needs \"schema_version\": 1");
  return cfg;
}

std::vector<Rational> r_values(const RunConfig& rc, const Json& cfg, bool allow_list) {
  std::vector<Rational> out;
  if (rc.R_list) {
    out = parse_rational_list(*rc.R_list);
  } else if (rc.R) {
    out.push_back(parse_rational(*rc.R));
  } else if (allow_list && cfg.contains("R_list")) {
    const Json& list = cfg.at("R_list");
    if (list.is_string()) {
      out = parse_rational_list(list.get<std::string>());
    } else {
      out = rational_vector_from_json(list);
    }
  } else if (cfg.contains("R")) {
    out = rational_vector_from_json(Json::array({cfg.at("R")}));
  } else {
    throw InputError("no R or R_list given");
  }
  if (out.empty()) throw InputError("R list is empty");
  if (!allow_list && out.size() != 1) throw InputError("this mode takes a single R");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] <= 0) throw InputError("R values must be positive");
    if (i > 0 && !(out[i - 1] < out[i])) throw InputError("R list must be strictly increasing");
  }
  return out;
}

std::uint64_t seed_of(const RunConfig& rc, const Json& cfg) {
  if (rc.seed) return *rc.seed;
  return cfg.value("seed", std::uint64_t{1});
}

struct Output {
  Json meta = Json::object();
  Json rows = Json::array();
  std::vector<std::string> csv;
};

void emit_reports(Output& o, std::vector<CountReport> reports, bool timing) {
  o.csv.push_back(csv_header());
  for (auto& r : reports) {
    if (!timing) r.elapsed_ms = 0;
    o.csv.push_back(csv_row(r));
    o.rows.push_back(to_json(r));
  }
}

const Json& section(const Json& cfg, const char* key) {
  if (!cfg.contains(key)) throw InputError(std::string("config needs a \"") + key + "\" section");
  return cfg.at(key);
}

void mode_lattice_info(const Json& cfg, Output& o) {
  const IntegerLattice L =
      cfg.contains("lattice") ? lattice_from_json(cfg.at("lattice")) : sigma_from_json(section(cfg, "sigma")).mukai();
  const Signature s = signature(L);
  const Integer disc = discriminant(L);
  o.csv.push_back("label,rank,n_plus,n_minus,n_zero,discriminant,even");
  o.csv.push_back(L.label() + "," + std::to_string(L.rank()) + "," + std::to_string(s.plus) + "," +
                  std::to_string(s.minus) + "," + std::to_string(s.zero) + "," + to_string(disc) + "," +
                  (L.is_even() ? "true" : "false"));
  o.rows.push_back(Json{{"label", L.label()},
                        {"rank", L.rank()},
                        {"signature", Json::array({s.plus, s.minus, s.zero})},
                        {"discriminant", to_string(disc)},
                        {"even", L.is_even()}});
}

void mode_coefficient(const Json& cfg, Output& o) {
  CoefficientResult c;
  if (cfg.contains("coefficient")) {
    const Json& j = cfg.at("coefficient");
    const std::string kind = j.value("kind", std::string("phase1"));
    const Integer disc(static_cast<long>(require_int(j, "disc")));
    if (kind == "slag") {
      c = coefficient_slag_general(static_cast<int>(require_int(j, "rank_lag")),
                                   rational_vector_from_json(Json::array({j.at("k_omega")}))[0], disc);
    } else if (kind == "phase1") {
      c = coefficient_phase1(static_cast<int>(require_int(j, "rho")),
                             rational_vector_from_json(Json::array({j.at("omega_sq")}))[0], disc);
      if (j.contains("twist")) c = coefficient_gl(c, twist_from_json(j.at("twist")));
    } else {
      throw InputError("coefficient kind must be phase1 or slag");
    }
  } else {
    c = coefficient_for(sigma_from_json(section(cfg, "sigma")));
  }
  o.csv.push_back("formula_id,value,quadrature_error");
  o.csv.push_back(c.formula_id + "," + format_double(static_cast<double>(c.value)) + "," +
                  (c.quadrature_error ? format_double(static_cast<double>(*c.quadrature_error)) : std::string()));
  o.rows.push_back(to_json(c));
}

void mode_volume(const RunConfig& rc, const Json& cfg, Output& o) {
  const std::uint64_t samples = cfg.value("samples", std::uint64_t{1000000});
  const std::uint64_t seed = seed_of(rc, cfg);
  RegionSpec region;
  std::optional<double> reference;
  if (cfg.contains("twistor")) {
    const TwistorPlane plane = twistor_plane_from_json(cfg.at("twistor"));
    region = seminorm_region(plane.ambient, plane.basis_double());
  } else {
    const StabilityCharge sigma = sigma_from_json(section(cfg, "sigma"));
    region = stability_region(sigma);
    reference = static_cast<double>(coefficient_for(sigma).value);
  }
  const VolumeEstimate v = mc_volume(region, samples, seed, rc.threads);
  o.csv.push_back("region,samples,seed,estimate,stderr,hits,body_volume,analytic_C");
  o.csv.push_back(region.kind + "," + std::to_string(samples) + "," + std::to_string(seed) + "," +
                  format_double(v.estimate) + "," + format_double(v.stderr_) + "," + std::to_string(v.hits) + "," +
                  format_double(v.body_volume) + "," + (reference ? format_double(*reference) : std::string()));
  Json row = to_json(v);
  row["region"] = region.kind;
  row["seed"] = seed;
  row["analytic_C"] = reference ? Json(format_double(*reference)) : Json(nullptr);
  o.rows.push_back(row);
}

void mode_twistor(const RunConfig& rc, const Json& cfg, const CountOptions& opts, Output& o) {
  const Json& t = section(cfg, "twistor");
  const TwistorPlane plane = twistor_plane_from_json(t);
  const auto Rs = r_values(rc, cfg, true);
  if (t.contains("isometry")) {
    IntMatrix g;
    for (const auto& row : t.at("isometry")) g.push_back(lattice_vector_from_json(row));
    const InvarianceReport rep = plane_invariance_check(plane, g, Rs, opts);
    o.csv.push_back("R,count_P,count_gP,equal");
    for (const auto& row : rep.rows) {
      const bool eq = row.count_p == row.count_gp;
      o.csv.push_back(to_string(row.R) + "," + to_string(row.count_p) + "," + to_string(row.count_gp) + "," +
                      (eq ? "true" : "false"));
      o.rows.push_back(Json{{"R", to_string(row.R)},
                            {"count_P", to_string(row.count_p)},
                            {"count_gP", to_string(row.count_gp)},
                            {"equal", eq}});
    }
    o.meta["all_equal"] = rep.all_equal;
    return;
  }
  std::vector<CountReport> reports;
  for (const auto& R : Rs) reports.push_back(twistor_count(plane, R, opts));
  emit_reports(o, std::move(reports), rc.timing);
}

void write_output(const RunConfig& rc, const Output& o, std::ostream& out) {
  std::string text;
  if (rc.format == "json") {
    Json doc{{"meta", o.meta}, {"rows", o.rows}};
    text = doc.dump(2) + "\n";
  } else {
    for (const auto& line : o.csv) text += line + "\n";
  }
  if (rc.output == "-") {
    out << text;
    return;
  }
  std::ofstream file(rc.output, std::ios::binary);
  if (!file) throw InputError("cannot write " + rc.output);
  file << text;
  if (!file) throw InputError("cannot write " + rc.output);
}

}  // namespace

std::vector<Rational> parse_rational_list(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) throw InputError("empty entry in R list");
    out.push_back(parse_rational(item));
  }
  return out;
}

std::string render_svg(const std::vector<CountReport>& reports) {
  const double width = 640, height = 400, margin = 50;
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& r : reports) {
    for (double y : {r.normalized, r.analytic_C.value_or(r.normalized)}) {
      lo = first ? y : std::min(lo, y);
      hi = first ? y : std::max(hi, y);
      first = false;
    }
  }
  if (hi <= lo) hi = lo + 1.0;
  const double pad = 0.1 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto px = [&](std::size_t i) {
    return reports.size() < 2 ? width / 2
                              : margin + (width - 2 * margin) * static_cast<double>(i) /
                                             static_cast<double>(reports.size() - 1);
  };
  auto py = [&](double y) { return height - margin - (height - 2 * margin) * (y - lo) / (hi - lo); };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
    << height - margin << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
    << "\" stroke=\"black\"/>\n";
  if (!reports.empty() && reports.front().analytic_C) {
    const double y = py(*reports.front().analytic_C);
    s << "<line x1=\"" << margin << "\" y1=\"" << y << "\" x2=\"" << width - margin << "\" y2=\"" << y
      << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    s << "<text x=\"" << width - margin << "\" y=\"" << y - 6 << "\" font-size=\"12\" text-anchor=\"end\">C = "
      << format_double(*reports.front().analytic_C) << "</text>\n";
  }
  s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < reports.size(); ++i) s << (i ? " " : "") << px(i) << "," << py(reports[i].normalized);
  s << "\"/>\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    s << "<circle cx=\"" << px(i) << "\" cy=\"" << py(reports[i].normalized) << "\" r=\"3\" fill=\"steelblue\"/>\n";
    s << "<text x=\"" << px(i) << "\" y=\"" << height - margin + 18 << "\" font-size=\"12\" text-anchor=\"middle\">"
      << to_string(reports[i].R) << "</text>\n";
  }
  s << "<text x=\"" << width / 2 << "\" y=\"" << height - 10 << "\" font-size=\"12\" text-anchor=\"middle\">R</text>\n";
  s << "<text x=\"14\" y=\"" << margin - 14 << "\" font-size=\"12\">count / R^d</text>\n";
  s << "</svg>\n";
  return s.str();
}

int run(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  try {
    if (rc.format != "csv" && rc.format != "json") throw InputError("format must be csv or json");
    if (rc.svg && rc.output == "-") throw InputError("--svg needs --output");
    const Json cfg = load_config(rc);
    CountOptions opts;
    opts.threads = std::max(1u, rc.threads);
    if (cfg.contains("point_budget")) opts.point_budget = cfg.at("point_budget").get<double>();
    if (rc.point_budget) opts.point_budget = *rc.point_budget;

    Output o;
    o.meta["mode"] = rc.mode;
    o.meta["schema_version"] = kSchemaVersion;
    std::vector<CountReport> plotted;
    if (rc.mode == "lattice-info") {
      mode_lattice_info(cfg, o);
    } else if (rc.mode == "count") {
      const StabilityCharge sigma = sigma_from_json(section(cfg, "sigma"));
      const auto Rs = r_values(rc, cfg, false);
      o.meta["sigma"] = to_json(sigma);
      emit_reports(o, {count_semistable(sigma, Rs.front(), opts)}, rc.timing);
    } else if (rc.mode == "sweep") {
      const StabilityCharge sigma = sigma_from_json(section(cfg, "sigma"));
      const auto Rs = r_values(rc, cfg, true);
      SweepResult sweep = convergence_sweep(sigma, Rs, opts);
      o.meta["sigma"] = to_json(sigma);
      o.meta["analytic"] = to_json(sweep.analytic);
      plotted = sweep.reports;
      emit_reports(o, std::move(sweep.reports), rc.timing);
    } else if (rc.mode == "coefficient") {
      mode_coefficient(cfg, o);
    } else if (rc.mode == "volume") {
      mode_volume(rc, cfg, o);
    } else if (rc.mode == "twistor") {
      mode_twistor(rc, cfg, opts, o);
    } else if (rc.mode == "slag") {
      const SlagForm form = slag_form_from_json(section(cfg, "slag"));
      const auto Rs = r_values(rc, cfg, true);
      std::vector<CountReport> reports;
      for (const auto& R : Rs) reports.push_back(slag_count(form, R, opts));
      o.meta["slag"] = to_json(form);
      plotted = reports;
      emit_reports(o, std::move(reports), rc.timing);
    } else {
      throw InputError("unknown mode \"" + rc.mode + "\"");
    }
    write_output(rc, o, out);
    if (rc.svg) {
      if (plotted.empty()) throw InputError("--svg applies to sweep and slag modes");
      std::ofstream file(rc.output + ".svg", std::ios::binary);
      if (!file) throw InputError("cannot write " + rc.output + ".svg");
      file << render_svg(plotted);
    }
    return kExitOk;
  } catch (const WallViolation& e) {
    err << "error=wall_violation witness=" << e.witness() << " reason=\"" << one_line(e.what()) << "\"\n";
    return kExitWall;
  } catch (const BudgetExceeded& e) {
    err << "error=budget_exceeded required=" << format_double(e.required()) << " budget=" << format_double(e.budget())
        << " reason=\"" << one_line(e.what()) << "\"\n";
    return kExitBudget;
  } catch (const InputError& e) {
    err << "error=input reason=\"" << one_line(e.what()) << "\"\n";
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error=input reason=\"" << one_line(e.what()) << "\"\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error=internal reason=\"" << one_line(e.what()) << "\"\n";
    return kExitInternal;
  }
}

}  // namespace k3count
