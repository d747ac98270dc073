#include "prism/costsim.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "prism/config.h"
#include "prism/tiers.h"

namespace prism::costsim {

namespace {

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return cells;
}

// Rows after the header, skipping blank lines.
Status ReadRows(const std::string& path, size_t columns,
                std::vector<std::vector<std::string>>* rows) {
  std::ifstream in(path);
  if (!in) return Status::IOError("cannot open " + path);
  std::string line;
  bool header = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    auto cells = SplitCsv(line);
    if (cells.size() != columns) {
      return Status::InvalidArgument(path + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(columns) + " columns");
    }
    rows->push_back(std::move(cells));
  }
  return Status::OK();
}

Device FromTier(const TierSpec& t) {
  return Device{t.code, t.name, t.read_latency_us, t.cost_per_gb, t.pe_cycles};
}

}  // namespace

std::vector<Device> DefaultDevices() {
  return {FromTier(NvmTier()), FromTier(TlcTier()), FromTier(QlcTier())};
}

std::vector<double> DefaultSizes() { return {0.2, 0.2, 2.0, 20.0, 200.0}; }

Status SimInput::Validate() const {
  if (devices.empty()) return Status::InvalidArgument("no devices");
  for (const auto& d : devices) {
    if (d.read_us < 0 || d.cost_per_gb < 0 || !(d.pe_cycles > 0)) {
      return Status::InvalidArgument("bad device " + d.name);
    }
  }
  const size_t n = sizes_gb.size();
  if (n == 0) return Status::InvalidArgument("no levels");
  if (profile.read_fraction.size() != n || profile.write_gb_per_day.size() != n) {
    return Status::InvalidArgument("profile does not cover every level");
  }
  double sum = profile.dram_read_fraction;
  for (double f : profile.read_fraction) {
    if (f < 0) return Status::InvalidArgument("negative read fraction");
    sum += f;
  }
  if (std::fabs(sum - 1.0) > 1e-6) return Status::InvalidArgument("read fractions must sum to 1");
  for (double w : profile.write_gb_per_day) {
    if (w < 0) return Status::InvalidArgument("negative write rate");
  }
  if (!(years > 0)) return Status::InvalidArgument("years must be > 0");
  return Status::OK();
}

double ProvisionedGb(double size_gb, double write_gb_per_day, double years, double pe_cycles) {
  const double spare = std::ceil(write_gb_per_day * 365.0 * years / pe_cycles);
  return std::max(size_gb, spare);
}

Status Simulate(const std::string& config, const SimInput& in, SimResult* out) {
  if (config.size() != in.sizes_gb.size()) {
    return Status::InvalidArgument("config " + config + " does not match the level count");
  }
  SimResult r;
  r.config = config;
  double logical = 0;
  for (size_t l = 0; l < config.size(); ++l) {
    auto it = std::find_if(in.devices.begin(), in.devices.end(),
                           [&](const Device& d) { return d.code == config[l]; });
    if (it == in.devices.end()) {
      return Status::InvalidArgument(std::string("unknown device letter ") + config[l]);
    }
    const double prov =
        ProvisionedGb(in.sizes_gb[l], in.profile.write_gb_per_day[l], in.years, it->pe_cycles);
    r.latency_us += in.profile.read_fraction[l] * it->read_us;
    r.cost += prov * it->cost_per_gb;
    r.provisioned_gb += prov;
    logical += in.sizes_gb[l];
  }
  r.cost_per_gb = logical > 0 ? r.cost / logical : 0;
  *out = r;
  return Status::OK();
}

void MarkPareto(std::vector<SimResult>* sorted) {
  // Within a run of equal cost only the lowest latency can survive, and it
  // survives when it beats every strictly cheaper point.
  double best_cheaper = INFINITY;
  size_t i = 0;
  while (i < sorted->size()) {
    size_t j = i;
    double group_min = INFINITY;
    while (j < sorted->size() && (*sorted)[j].cost == (*sorted)[i].cost) {
      group_min = std::min(group_min, (*sorted)[j].latency_us);
      ++j;
    }
    for (size_t k = i; k < j; ++k) {
      auto& r = (*sorted)[k];
      r.pareto = r.latency_us == group_min && r.latency_us < best_cheaper;
    }
    best_cheaper = std::min(best_cheaper, group_min);
    i = j;
  }
}

Status Sweep(const SimInput& in, std::vector<SimResult>* out) {
  Status s = in.Validate();
  if (!s.ok()) return s;
  const size_t levels = in.sizes_gb.size();
  const size_t k = in.devices.size();
  size_t total = 1;
  for (size_t l = 0; l < levels; ++l) total *= k;
  out->clear();
  out->reserve(total);
  std::string config(levels, '?');
  for (size_t idx = 0; idx < total; ++idx) {
    size_t rest = idx;
    for (size_t l = levels; l-- > 0;) {
      config[l] = in.devices[rest % k].code;
      rest /= k;
    }
    SimResult r;
    s = Simulate(config, in, &r);
    if (!s.ok()) return s;
    out->push_back(r);
  }
  std::sort(out->begin(), out->end(), [](const SimResult& a, const SimResult& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.latency_us != b.latency_us) return a.latency_us < b.latency_us;
    return a.config < b.config;
  });
  MarkPareto(out);
  return Status::OK();
}

bool SpeedNonIncreasing(const std::string& config, const std::vector<Device>& devices) {
  auto latency = [&](char c) -> double {
    for (const auto& d : devices) {
      if (d.code == c) return d.read_us;
    }
    return INFINITY;
  };
  for (size_t l = 1; l < config.size(); ++l) {
    if (latency(config[l - 1]) > latency(config[l])) return false;
  }
  return true;
}

Status ReadDevicesCsv(const std::string& path, std::vector<Device>* out) {
  std::vector<std::vector<std::string>> rows;
  Status s = ReadRows(path, 5, &rows);
  if (!s.ok()) return s;
  out->clear();
  for (const auto& row : rows) {
    Device d;
    if (row[0].size() != 1) return Status::InvalidArgument("device code must be one letter");
    d.code = row[0][0];
    d.name = row[1];
    s = ParseDouble(row[2], &d.read_us);
    if (s.ok()) s = ParseDouble(row[3], &d.cost_per_gb);
    if (s.ok()) s = ParseDouble(row[4], &d.pe_cycles);
    if (!s.ok()) return Status::InvalidArgument(path + ": " + s.message());
    out->push_back(d);
  }
  return Status::OK();
}

Status ReadSizesCsv(const std::string& path, std::vector<double>* out) {
  std::vector<std::vector<std::string>> rows;
  Status s = ReadRows(path, 2, &rows);
  if (!s.ok()) return s;
  out->assign(rows.size(), -1);
  for (const auto& row : rows) {
    int64_t level = 0;
    double size = 0;
    std::string lv = row[0];
    if (!lv.empty() && (lv[0] == 'L' || lv[0] == 'l')) lv.erase(0, 1);
    s = ParseInt(lv, &level);
    if (s.ok()) s = ParseDouble(row[1], &size);
    if (!s.ok()) return Status::InvalidArgument(path + ": " + s.message());
    if (level < 0 || static_cast<size_t>(level) >= out->size() || size < 0) {
      return Status::InvalidArgument(path + ": level out of range");
    }
    (*out)[static_cast<size_t>(level)] = size;
  }
  for (double v : *out) {
    if (v < 0) return Status::InvalidArgument(path + ": missing level");
  }
  return Status::OK();
}

Status ReadProfileCsv(const std::string& path, size_t levels, Profile* out) {
  std::vector<std::vector<std::string>> rows;
  Status s = ReadRows(path, 3, &rows);
  if (!s.ok()) return s;
  Profile p;
  p.read_fraction.assign(levels, 0);
  p.write_gb_per_day.assign(levels, 0);
  for (const auto& row : rows) {
    double f = 0;
    double w = 0;
    s = ParseDouble(row[1], &f);
    if (s.ok()) s = ParseDouble(row[2], &w);
    if (!s.ok()) return Status::InvalidArgument(path + ": " + s.message());
    const std::string& b = row[0];
    if (b == "dram" || b == "memtable" || b == "cache") {
      p.dram_read_fraction += f;
      continue;
    }
    int64_t level = -1;
    if (b.size() >= 2 && (b[0] == 'L' || b[0] == 'l')) s = ParseInt(b.substr(1), &level);
    if (!s.ok() || level < 0 || static_cast<size_t>(level) >= levels) {
      return Status::InvalidArgument(path + ": bad bucket " + b);
    }
    p.read_fraction[static_cast<size_t>(level)] += f;
    p.write_gb_per_day[static_cast<size_t>(level)] += w;
  }
  *out = p;
  return Status::OK();
}

std::string ResultsCsv(const std::vector<SimResult>& results) {
  std::ostringstream os;
  os << "config,latency_us,cost,cost_per_gb,provisioned_gb,pareto\n";
  os << std::setprecision(10);
  for (const auto& r : results) {
    os << r.config << ',' << r.latency_us << ',' << r.cost << ',' << r.cost_per_gb << ','
       << r.provisioned_gb << ',' << (r.pareto ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace prism::costsim
