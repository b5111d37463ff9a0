#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "k3count/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Exact lattice point counts for K3 stability data"};
  k3count::RunConfig rc;
  std::string threads = "1";
  std::uint64_t seed = 0;
  std::string R, R_list;
  double budget = 0;
  app.add_option("--mode", rc.mode, "lattice-info | count | coefficient | sweep | volume | twistor | slag")->required();
  app.add_option("--config", rc.config_path, "JSON config (schema_version 1)")->required();
  auto* r_opt = app.add_option("--R", R, "radius as p/q");
  auto* list_opt = app.add_option("--R-list", R_list, "comma-separated radii");
  auto* seed_opt = app.add_option("--seed", seed, "Monte Carlo seed");
  app.add_option("--threads", threads, "worker threads or auto");
  app.add_option("--output", rc.output, "output path, - for stdout");
  app.add_option("--format", rc.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--svg", rc.svg, "also write <output>.svg");
  app.add_flag("--timing", rc.timing, "record elapsed_ms instead of 0");
  auto* budget_opt = app.add_option("--point-budget", budget, "refuse enumerations above this many candidates");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error=input reason=\"" << e.what() << "\"\n";
    return k3count::kExitInput;
  }
  if (*r_opt) rc.R = R;
  if (*list_opt) rc.R_list = R_list;
  if (*seed_opt) rc.seed = seed;
  if (*budget_opt) rc.point_budget = budget;
  if (threads == "auto") {
    rc.threads = std::max(1u, std::thread::hardware_concurrency());
  } else {
    try {
      const long n = std::stol(threads);
      if (n < 1) throw std::invalid_argument("threads");
      rc.threads = static_cast<unsigned>(n);
    } catch (const std::exception&) {
      std::cerr << "error=input reason=\"--threads must be a positive integer or auto\"\n";
      return k3count::kExitInput;
    }
  }
  return k3count::run(rc, std::cout, std::cerr);
}
