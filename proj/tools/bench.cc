// YCSB-style driver: load a store, run a workload, compare two configs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "prism/bench/runner.h"
#include "prism/bench/workload.h"
#include "prism/engine/db.h"

using namespace prism;
using namespace prism::bench;

namespace {

int Fail(const Status& s, const std::string& what) {
  std::cerr << what << ": " << s.ToString() << "\n";
  return 1;
}

// Engine options start from the desk geometry; the config file overrides.
Status MakeOptions(const std::string& config, Options* o) {
  *o = DeskOptions();
  if (config.empty()) return Status::OK();
  return LoadOptionsFile(config, o);
}

Status RunOne(const Options& o, const std::string& db_path, const WorkloadSpec& spec,
              const RunOptions& ro, MetricsReport* report) {
  std::unique_ptr<DB> db;
  Status s = DB::Open(o, db_path, &db);
  if (!s.ok()) return s;
  s = RunWorkload(db.get(), spec, ro, report);
  Status c = db->Close();
  return s.ok() ? c : s;
}

void PrintSummary(const std::string& label, const MetricsReport& r) {
  std::printf("%-8s %10.0f ops/s  read p50/p99 %.0f/%.0f us  compactions %llu  bytes %llu  "
              "hot-fast %.3f\n",
              label.c_str(), r.throughput_ops, r.read.p50_us, r.read.p99_us,
              static_cast<unsigned long long>(r.total.compactions),
              static_cast<unsigned long long>(r.total.compaction_bytes_written),
              r.hot_fast_tier_fraction);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Workload driver for the prism store"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string db_path;
  std::string config;
  uint64_t seed = 1;
  bool no_inject = false;

  auto* load = app.add_subcommand("load", "Insert the spec's records into an empty store");
  load->add_option("--spec", spec_path, "Workload file")->required();
  load->add_option("--db", db_path, "Store directory")->required();
  load->add_option("--config", config, "Engine options file");
  load->add_option("--seed", seed, "Value seed");
  load->add_flag("--no-inject", no_inject, "Skip latency injection while loading");

  std::string out_path = "report.json";
  std::string copy_from;
  size_t hot_keys = 1000;
  auto* run = app.add_subcommand("run", "Run the workload and write a report");
  run->add_option("--spec", spec_path, "Workload file")->required();
  run->add_option("--db", db_path, "Store directory")->required();
  run->add_option("--config", config, "Engine options file");
  run->add_option("--seed", seed, "Request stream seed");
  run->add_option("--out", out_path, "JSON report; heatmap.csv and iostat.csv go next to it");
  run->add_option("--copy-from", copy_from, "Copy this loaded store into --db first");
  run->add_option("--hot-keys", hot_keys, "Size of the hot set for the heatmap");

  std::string cfg_a;
  std::string cfg_b;
  std::string work_dir = "compare_work";
  auto* cmp = app.add_subcommand("compare", "Run two configs from one loaded store");
  cmp->add_option("--a", cfg_a, "Baseline engine options file")->required();
  cmp->add_option("--b", cfg_b, "Second engine options file")->required();
  cmp->add_option("--spec", spec_path, "Workload file")->required();
  cmp->add_option("--db", db_path, "Loaded store (left untouched)")->required();
  cmp->add_option("--seed", seed, "Request stream seed");
  cmp->add_option("--work", work_dir, "Scratch directory for the two copies");
  cmp->add_option("--out", out_path, "Comparison JSON");
  cmp->add_option("--hot-keys", hot_keys, "Size of the hot set for the heatmap");

  CLI11_PARSE(app, argc, argv);

  WorkloadSpec spec;
  Status s = LoadWorkloadFile(spec_path, &spec);
  if (!s.ok()) return Fail(s, "workload");

  if (*load) {
    Options o;
    s = MakeOptions(config, &o);
    if (!s.ok()) return Fail(s, "options");
    if (no_inject) o.inject_latency = false;
    std::unique_ptr<DB> db;
    s = DB::Open(o, db_path, &db);
    if (!s.ok()) return Fail(s, "open");
    LoadResult lr;
    s = LoadDatabase(db.get(), spec, seed, &lr);
    Status c = db->Close();
    if (!s.ok()) return Fail(s, "load");
    if (!c.ok()) return Fail(c, "close");
    std::printf("loaded %llu records in %.1f s\n", static_cast<unsigned long long>(lr.records),
                lr.seconds);
    return 0;
  }

  RunOptions ro;
  ro.seed = seed;
  ro.hot_keys = hot_keys;

  if (*run) {
    Options o;
    s = MakeOptions(config, &o);
    if (!s.ok()) return Fail(s, "options");
    if (!copy_from.empty()) {
      s = CopyStore(copy_from, db_path);
      if (!s.ok()) return Fail(s, "copy");
    }
    MetricsReport r;
    s = RunOne(o, db_path, spec, ro, &r);
    if (!s.ok()) return Fail(s, "run");
    s = WriteReport(r, out_path);
    if (!s.ok()) return Fail(s, "report");
    PrintSummary("run", r);
    return 0;
  }

  // compare
  std::array<MetricsReport, 2> reports;
  const std::array<std::string, 2> cfgs = {cfg_a, cfg_b};
  const std::array<std::string, 2> names = {"a", "b"};
  for (size_t i = 0; i < 2; ++i) {
    Options o;
    s = MakeOptions(cfgs[i], &o);
    if (!s.ok()) return Fail(s, "options " + cfgs[i]);
    const std::string dir = (std::filesystem::path(work_dir) / names[i]).string();
    s = CopyStore(db_path, dir);
    if (!s.ok()) return Fail(s, "copy");
    s = RunOne(o, dir, spec, ro, &reports[i]);
    if (!s.ok()) return Fail(s, "run " + names[i]);
    s = WriteReport(reports[i], (std::filesystem::path(work_dir) / (names[i] + "_report") /
                                 "report.json")
                                    .string());
    if (!s.ok()) return Fail(s, "report");
    PrintSummary(names[i], reports[i]);
  }
  std::ofstream out(out_path, std::ios::trunc);
  out << CompareJson(reports[0], reports[1]).dump(2) << "\n";
  if (!out) return Fail(Status::IOError("cannot write " + out_path), "compare");
  return 0;
}
