#pragma once

// Cost / read-latency model of every level-to-device assignment, with spare
// capacity added where a device would wear out before the lifetime target.

#include <cstdint>
#include <string>
#include <vector>

#include "prism/status.h"

namespace prism::costsim {

struct Device {
  char code = '?';
  std::string name;
  double read_us = 0;  // per 4 KB read
  double cost_per_gb = 0;
  double pe_cycles = 0;
};

// NVM / TLC / QLC with the same figures as the engine's default tiers.
std::vector<Device> DefaultDevices();
// L0..L4 in GB: 0.2, 0.2, 2, 20, 200.
std::vector<double> DefaultSizes();

struct Profile {
  // Fraction of reads answered at each level.
  std::vector<double> read_fraction;
  // Reads answered from DRAM (memtable, block cache); no device latency.
  double dram_read_fraction = 0;
  std::vector<double> write_gb_per_day;
};

struct SimInput {
  std::vector<Device> devices;
  std::vector<double> sizes_gb;
  Profile profile;
  double years = 3;

  Status Validate() const;
};

struct SimResult {
  std::string config;
  double latency_us = 0;
  double cost = 0;
  double cost_per_gb = 0;  // over the logical size
  double provisioned_gb = 0;
  bool pareto = false;
};

// Capacity that keeps a device within its P/E budget for the lifetime,
// rounded up to whole GB, or the level size when that is larger.
double ProvisionedGb(double size_gb, double write_gb_per_day, double years, double pe_cycles);

Status Simulate(const std::string& config, const SimInput& in, SimResult* out);

// All device^levels configurations ordered by cost (then latency, then
// name) with the Pareto flag set.
Status Sweep(const SimInput& in, std::vector<SimResult>* out);

// Single pass over results sorted by cost; marks every point no other point
// dominates.
void MarkPareto(std::vector<SimResult>* sorted);

// True when no level sits on a slower device than the level below it.
bool SpeedNonIncreasing(const std::string& config, const std::vector<Device>& devices);

// CSV formats (first line is a header):
//   devices: code,name,read_us,cost_per_gb,pe_cycles
//   sizes:   level,size_gb
//   profile: bucket,read_fraction,write_gb_per_day   (bucket = dram or L<n>)
//   output:  config,latency_us,cost,cost_per_gb,provisioned_gb,pareto
Status ReadDevicesCsv(const std::string& path, std::vector<Device>* out);
Status ReadSizesCsv(const std::string& path, std::vector<double>* out);
Status ReadProfileCsv(const std::string& path, size_t levels, Profile* out);
std::string ResultsCsv(const std::vector<SimResult>& results);

}  // namespace prism::costsim
