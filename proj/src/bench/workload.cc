#include "prism/bench/workload.h"

#include <cmath>
#include <cstdio>

namespace prism::bench {

const char* KeyDistributionName(KeyDistribution d) {
  switch (d) {
    case KeyDistribution::kZipfian:
      return "zipfian";
    case KeyDistribution::kLatest:
      return "latest";
    case KeyDistribution::kUniform:
      return "uniform";
  }
  return "?";
}

Status WorkloadSpec::Validate() const {
  for (double f : {read, update, insert, scan, rmw}) {
    if (f < 0 || f > 1) return Status::InvalidArgument("op fraction outside [0, 1]");
  }
  const double sum = read + update + insert + scan + rmw;
  if (std::fabs(sum - 1.0) > 1e-9) return Status::InvalidArgument("op fractions must sum to 1");
  if (distribution != KeyDistribution::kUniform && !(theta > 0)) {
    return Status::InvalidArgument("theta must be > 0");
  }
  if (record_count == 0) return Status::InvalidArgument("records must be > 0");
  if (clients < 1) return Status::InvalidArgument("clients must be >= 1");
  if (warmup < 0 || warmup >= 1) return Status::InvalidArgument("warmup must be in [0, 1)");
  if (scan_length < 1) return Status::InvalidArgument("scan_length must be >= 1");
  if (key_width < 1 || key_width > 20) return Status::InvalidArgument("key_width must be 1..20");
  return Status::OK();
}

Status PresetWorkload(const std::string& name, WorkloadSpec* out) {
  WorkloadSpec w;
  w.name = name;
  w.read = w.update = w.insert = w.scan = w.rmw = 0;
  if (name == "A") {
    w.read = 0.5;
    w.update = 0.5;
  } else if (name == "B") {
    w.read = 0.95;
    w.update = 0.05;
  } else if (name == "C") {
    w.read = 1.0;
  } else if (name == "D") {
    w.read = 0.95;
    w.insert = 0.05;
    w.distribution = KeyDistribution::kLatest;
  } else if (name == "E") {
    w.scan = 0.95;
    w.insert = 0.05;
  } else if (name == "F") {
    w.read = 0.5;
    w.rmw = 0.5;
  } else if (name == "custom") {
    w.read = 1.0;
  } else {
    return Status::InvalidArgument("unknown workload " + name);
  }
  *out = w;
  return Status::OK();
}

Status ApplyWorkload(const KeyValues& kv, WorkloadSpec* out) {
  for (const auto& [k, v] : kv) {
    if (k == "name") {
      Status s = PresetWorkload(v, out);
      if (!s.ok()) return s;
    }
  }
  for (const auto& [k, v] : kv) {
    Status s;
    uint64_t u = 0;
    int64_t i = 0;
    if (k == "name") {
      continue;
    } else if (k == "read") {
      s = ParseDouble(v, &out->read);
    } else if (k == "update") {
      s = ParseDouble(v, &out->update);
    } else if (k == "insert") {
      s = ParseDouble(v, &out->insert);
    } else if (k == "scan") {
      s = ParseDouble(v, &out->scan);
    } else if (k == "rmw") {
      s = ParseDouble(v, &out->rmw);
    } else if (k == "distribution") {
      if (v == "zipfian") {
        out->distribution = KeyDistribution::kZipfian;
      } else if (v == "latest") {
        out->distribution = KeyDistribution::kLatest;
      } else if (v == "uniform") {
        out->distribution = KeyDistribution::kUniform;
      } else {
        s = Status::InvalidArgument("unknown distribution " + v);
      }
    } else if (k == "theta") {
      s = ParseDouble(v, &out->theta);
    } else if (k == "records") {
      s = ParseSize(v, &out->record_count);
    } else if (k == "value_size") {
      s = ParseSize(v, &out->value_size);
    } else if (k == "requests") {
      s = ParseSize(v, &out->request_count);
    } else if (k == "clients") {
      s = ParseInt(v, &i);
      out->clients = static_cast<int>(i);
    } else if (k == "warmup") {
      s = ParseDouble(v, &out->warmup);
    } else if (k == "scan_length") {
      s = ParseInt(v, &i);
      out->scan_length = static_cast<int>(i);
    } else if (k == "key_width") {
      s = ParseInt(v, &i);
      out->key_width = static_cast<int>(i);
    } else if (k == "scramble_seed") {
      s = ParseSize(v, &u);
      out->scramble_seed = u;
    } else {
      s = Status::InvalidArgument("unknown workload key " + k);
    }
    if (!s.ok()) return Status::InvalidArgument(k + ": " + s.message());
  }
  return out->Validate();
}

Status LoadWorkloadFile(const std::string& path, WorkloadSpec* out) {
  KeyValues kv;
  Status s = ReadKeyValueFile(path, &kv);
  if (!s.ok()) return s;
  return ApplyWorkload(kv, out);
}

std::string FormatKey(uint64_t index, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*llu", width, static_cast<unsigned long long>(index));
  return buf;
}

}  // namespace prism::bench
