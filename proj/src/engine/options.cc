#include "prism/engine/options.h"

#include <cmath>

namespace prism {

uint64_t Options::LevelTarget(int level) const {
  if (level <= 0) return write_buffer_size;
  return static_cast<uint64_t>(static_cast<double>(max_bytes_for_level_base) *
                               std::pow(level_size_multiplier, level - 1));
}

Status Options::Validate() const {
  if (num_levels < 2 || num_levels > kMaxLevels) {
    return Status::InvalidArgument("num_levels must be in [2, 8]");
  }
  if (static_cast<int>(tier_mapping.size()) != num_levels) {
    return Status::InvalidArgument("tier_mapping length must equal num_levels");
  }
  if (write_buffer_size == 0 || target_file_size == 0 || block_size < 64) {
    return Status::InvalidArgument("buffer, file and block sizes must be positive");
  }
  if (level0_compaction_trigger < 1 || level0_stop_writes_trigger < level0_compaction_trigger) {
    return Status::InvalidArgument("bad L0 triggers");
  }
  if (!(level_size_multiplier > 1.0)) return Status::InvalidArgument("multiplier must be > 1");
  if (pin_headroom_files < 0.0) return Status::InvalidArgument("pin_headroom_files must be >= 0");
  if (pin_threshold < 0.0 || pin_threshold > 1.0) {
    return Status::InvalidArgument("pin_threshold must be in [0, 1]");
  }
  if (compaction_threads < 1) return Status::InvalidArgument("compaction_threads must be >= 1");
  if (max_immutable_memtables < 1) return Status::InvalidArgument("max_immutable_memtables >= 1");
  for (const auto& t : tiers) {
    Status s = ValidateTier(t);
    if (!s.ok()) return s;
  }
  TierMapping m;
  return TierMapping::Parse(tier_mapping, tiers, &m);
}

namespace {

Status SetTierField(Options* o, std::string_view code_and_field, const std::string& value) {
  // "<code>.<field>"
  if (code_and_field.size() < 3 || code_and_field[1] != '.') {
    return Status::InvalidArgument("tier keys look like tier.N.read_us");
  }
  const char code = code_and_field[0];
  const std::string_view field = code_and_field.substr(2);
  TierSpec* spec = nullptr;
  for (auto& t : o->tiers) {
    if (t.code == code) spec = &t;
  }
  if (spec == nullptr) {
    o->tiers.push_back(TierSpec{std::string(1, code), code, 1, 1, 1, 1, 0, std::string(1, code)});
    spec = &o->tiers.back();
  }
  if (field == "name") {
    spec->name = value;
    return Status::OK();
  }
  if (field == "dir") {
    spec->dir = value;
    return Status::OK();
  }
  if (field == "capacity") return ParseSize(value, &spec->capacity_bytes);
  double* target = nullptr;
  if (field == "read_us") target = &spec->read_latency_us;
  if (field == "write_us") target = &spec->write_latency_us;
  if (field == "cost") target = &spec->cost_per_gb;
  if (field == "pe") target = &spec->pe_cycles;
  if (target == nullptr) return Status::InvalidArgument("unknown tier field " + std::string(field));
  return ParseDouble(value, target);
}

template <typename T>
Status SetInt(const std::string& v, T* out) {
  int64_t x = 0;
  Status s = ParseInt(v, &x);
  if (s.ok()) *out = static_cast<T>(x);
  return s;
}

template <typename T>
Status SetSize(const std::string& v, T* out) {
  uint64_t x = 0;
  Status s = ParseSize(v, &x);
  if (s.ok()) *out = static_cast<T>(x);
  return s;
}

}  // namespace

Status ApplyOptions(const KeyValues& kv, Options* o) {
  for (const auto& [k, v] : kv) {
    Status s;
    if (k == "num_levels") {
      s = SetInt(v, &o->num_levels);
    } else if (k == "write_buffer_size" || k == "flush_threshold") {
      s = SetSize(v, &o->write_buffer_size);
    } else if (k == "level0_compaction_trigger") {
      s = SetInt(v, &o->level0_compaction_trigger);
    } else if (k == "level0_stop_writes_trigger") {
      s = SetInt(v, &o->level0_stop_writes_trigger);
    } else if (k == "max_immutable_memtables") {
      s = SetInt(v, &o->max_immutable_memtables);
    } else if (k == "max_bytes_for_level_base") {
      s = SetSize(v, &o->max_bytes_for_level_base);
    } else if (k == "level_size_multiplier") {
      s = ParseDouble(v, &o->level_size_multiplier);
    } else if (k == "target_file_size") {
      s = SetSize(v, &o->target_file_size);
    } else if (k == "max_compaction_bytes") {
      s = SetSize(v, &o->max_compaction_bytes);
    } else if (k == "block_size") {
      s = SetSize(v, &o->block_size);
    } else if (k == "bloom_bits_per_key") {
      s = SetInt(v, &o->bloom_bits_per_key);
    } else if (k == "block_cache_bytes" || k == "cache_bytes") {
      s = SetSize(v, &o->block_cache_bytes);
    } else if (k == "block_cache_shards") {
      s = SetInt(v, &o->block_cache_shards);
    } else if (k == "max_key_size") {
      s = SetSize(v, &o->max_key_size);
    } else if (k == "tier_mapping") {
      o->tier_mapping = v;
    } else if (k.rfind("tier.", 0) == 0) {
      s = SetTierField(o, std::string_view(k).substr(5), v);
    } else if (k == "inject_latency") {
      s = ParseBool(v, &o->inject_latency);
    } else if (k == "spin_margin_us") {
      s = ParseDouble(v, &o->spin_margin_us);
    } else if (k == "inject_compaction_reads") {
      s = ParseBool(v, &o->inject_compaction_reads);
    } else if (k == "pinning_enabled") {
      s = ParseBool(v, &o->pinning_enabled);
    } else if (k == "pin_headroom_files") {
      s = ParseDouble(v, &o->pin_headroom_files);
    } else if (k == "pin_threshold") {
      s = ParseDouble(v, &o->pin_threshold);
    } else if (k == "tracker_capacity") {
      s = SetInt(v, &o->tracker_capacity);
    } else if (k == "score_weight") {
      s = SetInt(v, &o->score_weight);
    } else if (k == "track_scans") {
      s = ParseBool(v, &o->track_scans);
    } else if (k == "compaction_threads") {
      s = SetInt(v, &o->compaction_threads);
    } else if (k == "inline_compaction") {
      s = ParseBool(v, &o->inline_compaction);
    } else if (k == "trivial_move") {
      s = ParseBool(v, &o->trivial_move);
    } else if (k == "seed") {
      s = SetInt(v, &o->seed);
    } else {
      return Status::InvalidArgument("unknown option '" + k + "'");
    }
    if (!s.ok()) return Status::InvalidArgument(k + ": " + s.message());
  }
  return Status::OK();
}

Status LoadOptionsFile(const std::string& path, Options* opts) {
  KeyValues kv;
  Status s = ReadKeyValueFile(path, &kv);
  if (!s.ok()) return s;
  return ApplyOptions(kv, opts);
}

}  // namespace prism
