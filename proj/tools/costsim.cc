// Cost vs read latency over every level-to-device assignment.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "prism/costsim.h"

using namespace prism;
using namespace prism::costsim;

int main(int argc, char** argv) {
  CLI::App app{"Level placement cost simulator"};
  app.require_subcommand(1);

  std::string devices_path;
  std::string profile_path;
  std::string sizes_path;
  std::string out_path = "frontier.csv";
  double years = 3;
  bool frontier_only = false;

  auto* sweep = app.add_subcommand("sweep", "Evaluate all configurations and mark the frontier");
  sweep->add_option("--devices", devices_path, "Device CSV (default: NVM/TLC/QLC)");
  sweep->add_option("--profile", profile_path, "Per-level read/write profile CSV")->required();
  sweep->add_option("--sizes", sizes_path, "Level size CSV (default: 0.2/0.2/2/20/200 GB)");
  sweep->add_option("--years", years, "Lifetime target");
  sweep->add_option("--out", out_path, "Output CSV ordered by cost");
  sweep->add_flag("--frontier-only", frontier_only, "Write only Pareto points");

  std::string config;
  auto* sim = app.add_subcommand("simulate", "Evaluate one configuration");
  sim->add_option("config", config, "One device letter per level, e.g. NNNTQ")->required();
  sim->add_option("--devices", devices_path, "Device CSV");
  sim->add_option("--profile", profile_path, "Per-level read/write profile CSV")->required();
  sim->add_option("--sizes", sizes_path, "Level size CSV");
  sim->add_option("--years", years, "Lifetime target");

  CLI11_PARSE(app, argc, argv);

  SimInput in;
  in.years = years;
  in.devices = DefaultDevices();
  in.sizes_gb = DefaultSizes();
  Status s;
  if (!devices_path.empty()) s = ReadDevicesCsv(devices_path, &in.devices);
  if (s.ok() && !sizes_path.empty()) s = ReadSizesCsv(sizes_path, &in.sizes_gb);
  if (s.ok()) s = ReadProfileCsv(profile_path, in.sizes_gb.size(), &in.profile);
  if (s.ok()) s = in.Validate();
  if (!s.ok()) {
    std::cerr << s.ToString() << "\n";
    return 1;
  }

  if (*sim) {
    SimResult r;
    s = Simulate(config, in, &r);
    if (!s.ok()) {
      std::cerr << s.ToString() << "\n";
      return 1;
    }
    std::cout << ResultsCsv({r});
    return 0;
  }

  std::vector<SimResult> results;
  s = Sweep(in, &results);
  if (!s.ok()) {
    std::cerr << s.ToString() << "\n";
    return 1;
  }
  std::vector<SimResult> rows;
  for (const auto& r : results) {
    if (!frontier_only || r.pareto) rows.push_back(r);
  }
  std::ofstream out(out_path, std::ios::trunc);
  out << ResultsCsv(rows);
  if (!out) {
    std::cerr << "cannot write " << out_path << "\n";
    return 1;
  }
  size_t n = 0;
  for (const auto& r : results) {
    if (!r.pareto) continue;
    ++n;
    std::cout << r.config << "  $" << r.cost << "  " << r.latency_us << " us\n";
  }
  std::cout << n << " frontier points of " << results.size() << "\n";
  return 0;
}
