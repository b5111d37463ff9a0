#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "k3count/serialize.hpp"

namespace k3count {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitInput = 2,
  kExitWall = 3,
  kExitBudget = 4,
};

struct RunConfig {
  std::string mode;  // lattice-info | count | coefficient | sweep | volume | twistor | slag
  std::string config_path;
  std::optional<Json> config;  // used instead of config_path when set
  std::optional<std::string> R;
  std::optional<std::string> R_list;  // "a,b,c"
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string output = "-";
  std::string format = "csv";
  bool svg = false;
  bool timing = false;  // elapsed_ms is written as 0 unless set, keeping output byte-stable
  std::optional<double> point_budget;
};

/// Parses "a,b,c" into rationals.
std::vector<Rational> parse_rational_list(const std::string& text);

/// Executes the mode and writes the report to config.output ("-" for `out`).
/// Failures print one line "error=<kind> ..." to `err` and map to ExitCode.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Minimal line chart of normalized counts against R with the analytic level.
std::string render_svg(const std::vector<CountReport>& reports);

}  // namespace k3count
