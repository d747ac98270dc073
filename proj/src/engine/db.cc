#include "prism/engine/db.h"

#include <chrono>
#include <filesystem>
#include <sstream>
#include <unordered_set>

#include "prism/engine/merger.h"
#include "prism/engine/table.h"
#include "prism/hash.h"
#include "prism/log.h"
#include "prism/placer.h"

namespace prism {

namespace {

uint64_t NowMicros() {
  return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(
                                   std::chrono::steady_clock::now().time_since_epoch())
                                   .count());
}

template <typename T>
std::string JoinIds(const std::vector<T>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

const char* ReadSourceName(ReadSource s) {
  switch (s) {
    case ReadSource::kNone:
      return "none";
    case ReadSource::kMemtable:
      return "memtable";
    case ReadSource::kBlockCache:
      return "block_cache";
    case ReadSource::kDevice:
      return "device";
  }
  return "?";
}

std::string CompactionEventCsvHeader() {
  return "job,level,trivial_move,upper_inputs,lower_inputs,input_scores,upper_outputs,"
         "lower_outputs,records_in,pinned,up_moved,down,superseded,tombstones_dropped,"
         "bytes_read,bytes_written,policy_boundary,policy_prob,micros";
}

std::string CompactionEventCsv(const CompactionEvent& e) {
  std::ostringstream os;
  os << e.job_id << ',' << e.level << ',' << (e.trivial_move ? 1 : 0) << ','
     << JoinIds(e.upper_inputs) << ',' << JoinIds(e.lower_inputs) << ','
     << JoinIds(e.input_scores) << ',' << e.upper_outputs << ',' << e.lower_outputs << ','
     << e.records_in << ',' << e.pinned << ',' << e.up_moved << ',' << e.down << ','
     << e.superseded << ',' << e.tombstones_dropped << ',' << e.bytes_read << ','
     << e.bytes_written << ',' << e.policy_boundary << ',' << e.policy_prob << ',' << e.micros;
  return os.str();
}

// Builds output tables for one level of a compaction, cutting files at the
// target size when split is set.
class OutputSink final : public RecordSink {
 public:
  OutputSink(DB* db, int level, bool retained, bool split)
      : db_(db), level_(level), retained_(retained), split_(split) {}

  Status Add(std::string_view key, SequenceNumber seq, ValueKind kind,
             std::string_view value) override {
    if (!builder_) {
      builder_ = std::make_unique<TableBuilder>(db_->options_.block_size,
                                                db_->options_.bloom_bits_per_key);
    }
    builder_->Add(key, seq, kind, value);
    clocks_.push_back(ClockOf(db_->ScoringTracker(), key));
    if (split_ && builder_->EstimatedSize() >= db_->options_.target_file_size) return Cut();
    return Status::OK();
  }

  Status Finish() { return Cut(); }

  void Abandon() {
    for (const auto& f : files_) db_->env_->DeleteFile(f->tier, f->id);
    files_.clear();
  }

  const std::vector<FilePtr>& files() const { return files_; }
  uint64_t bytes() const { return bytes_; }

 private:
  Status Cut() {
    if (!builder_ || builder_->entries() == 0) return Status::OK();
    TableProps props;
    std::string contents = builder_->Finish(&props);
    builder_.reset();
    bytes_ += contents.size();
    FilePtr f;
    Status s = db_->OutputTable(level_, retained_, std::move(contents), props, clocks_, &f);
    clocks_.clear();
    if (!s.ok()) return s;
    files_.push_back(std::move(f));
    return Status::OK();
  }

  DB* db_;
  int level_;
  bool retained_;
  bool split_;
  std::unique_ptr<TableBuilder> builder_;
  std::vector<int8_t> clocks_;
  std::vector<FilePtr> files_;
  uint64_t bytes_ = 0;
};

struct DB::JobResult {
  VersionEdit edit;
  CompactionEvent event;
  PinnedMergeStats merge;
};

DB::DB(const Options& options, std::string path) : options_(options), path_(std::move(path)) {
  TierMapping mapping;
  TierMapping::Parse(options_.tier_mapping, options_.tiers, &mapping);
  env_ = std::make_unique<TierEnv>(path_, options_.tiers, mapping, options_.inject_latency,
                                   options_.spin_margin_us);
  cache_ = std::make_unique<BlockCache>(options_.block_cache_bytes, options_.block_cache_shards);
  mapper_ = std::make_unique<Mapper>(options_.pin_threshold);
  TrackerOptions topts;
  topts.capacity = options_.tracker_capacity;
  topts.background_eviction = !options_.inline_compaction;
  tracker_ = std::make_unique<Tracker>(topts, &mapper_->histogram());
  running_ = RunningJobs(options_.num_levels);
}

Status DB::Open(const Options& options, const std::string& path, std::unique_ptr<DB>* out) {
  Status s = options.Validate();
  if (!s.ok()) return s;
  std::unique_ptr<DB> db(new DB(options, path));
  s = db->Recover();
  if (!s.ok()) return s;
  db->StartThreads();
  *out = std::move(db);
  return Status::OK();
}

DB::~DB() { Close(); }

Status DB::Recover() {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path root(path_);
  const fs::path manifest_path = root / "MANIFEST";
  const bool exists = fs::exists(manifest_path, ec);
  if (exists && options_.error_if_exists) return Status::InvalidArgument(path_ + " exists");
  if (!exists && !options_.create_if_missing) {
    return Status::InvalidArgument(path_ + " does not exist");
  }
  fs::create_directories(root, ec);
  if (ec) return Status::IOError("mkdir " + path_ + ": " + ec.message());
  Status s = env_->Init();
  if (!s.ok()) return s;

  auto v = std::make_shared<Version>(options_.num_levels);
  uint64_t next_file = 1;
  SequenceNumber last_seq = 0;
  if (exists) {
    ManifestState state;
    s = Manifest::Replay(manifest_path.string(), &state);
    if (!s.ok()) return s;
    next_file = state.next_file_id;
    last_seq = state.last_seq;
    for (auto& fm : state.files) {
      if (fm.level < 0 || fm.level >= options_.num_levels) {
        return Status::Corruption("manifest level out of range");
      }
      std::shared_ptr<TierFile> file;
      s = env_->OpenFile(fm.tier, fm.id, &file);
      if (!s.ok()) return s;
      env_->AddResident(fm.tier, file->size());
      s = Table::Open(env_.get(), cache_.get(), file, fm.level, {}, &fm.table);
      if (!s.ok()) return s;
      v->levels[static_cast<size_t>(fm.level)].push_back(std::make_shared<FileMeta>(fm));
    }
    for (int l = 0; l < v->num_levels; ++l) SortLevel(l, &v->levels[static_cast<size_t>(l)]);
    s = v->CheckInvariants();
    if (!s.ok()) return s;
    env_->ResetCounters();
  }
  next_file_id_.store(next_file);
  last_seq_.store(last_seq);
  version_ = v;
  s = manifest_.WriteSnapshot(manifest_path.string(), *v, next_file, last_seq);
  if (!s.ok()) return s;

  const fs::path log_path = root / "COMPACTION_LOG";
  const bool log_exists = fs::exists(log_path, ec);
  event_log_ = std::fopen(log_path.c_str(), "a");
  if (event_log_ != nullptr && !log_exists) {
    std::fprintf(event_log_, "%s\n", CompactionEventCsvHeader().c_str());
  }

  mem_ = std::make_shared<MemTable>();
  std::lock_guard<std::mutex> lock(mu_);
  PublishLocked();
  return Status::OK();
}

void DB::StartThreads() {
  if (options_.pinning_enabled) tracker_->StartBackground();
  if (options_.inline_compaction) return;
  flush_thread_ = std::thread([this] { FlushLoop(); });
  for (int i = 0; i < options_.compaction_threads; ++i) {
    workers_.emplace_back([this] { CompactionLoop(); });
  }
}

PickerConfig DB::MakePickerConfig() const {
  PickerConfig cfg;
  cfg.num_levels = options_.num_levels;
  cfg.level0_trigger = options_.level0_compaction_trigger;
  for (int l = 0; l < options_.num_levels; ++l) cfg.level_targets.push_back(options_.LevelTarget(l));
  cfg.selection = options_.pinning_enabled ? FileSelection::kMinScore : FileSelection::kLargestFile;
  cfg.max_compaction_bytes = options_.max_compaction_bytes != 0 ? options_.max_compaction_bytes
                                                                : 25 * options_.target_file_size;
  cfg.room_headroom =
      static_cast<uint64_t>(options_.pin_headroom_files * static_cast<double>(options_.target_file_size));
  return cfg;
}

const Tracker* DB::ScoringTracker() const {
  return options_.pinning_enabled ? tracker_.get() : nullptr;
}

void DB::PublishLocked() {
  auto sv = std::make_shared<SuperVersion>();
  sv->mem = mem_;
  sv->imms.assign(imms_.rbegin(), imms_.rend());
  sv->version = version_;
  std::lock_guard<std::mutex> lock(sv_mu_);
  sv_ = std::move(sv);
}

std::shared_ptr<const DB::SuperVersion> DB::GetSuperVersion() const {
  std::lock_guard<std::mutex> lock(sv_mu_);
  return sv_;
}

std::shared_ptr<const Version> DB::CurrentVersion() const {
  std::lock_guard<std::mutex> lock(mu_);
  return version_;
}

void DB::SwitchMemTableLocked() {
  imms_.push_back(mem_);
  mem_ = std::make_shared<MemTable>();
  PublishLocked();
}

Status DB::Put(std::string_view key, std::string_view value, SequenceNumber* seq) {
  Status s = Write(key, value, ValueKind::kPut, seq);
  if (s.ok()) counters_.puts.fetch_add(1, std::memory_order_relaxed);
  return s;
}

Status DB::Delete(std::string_view key, SequenceNumber* seq) {
  Status s = Write(key, {}, ValueKind::kTombstone, seq);
  if (s.ok()) counters_.deletes.fetch_add(1, std::memory_order_relaxed);
  return s;
}

Status DB::Write(std::string_view key, std::string_view value, ValueKind kind,
                 SequenceNumber* seq_out) {
  if (key.empty()) return Status::InvalidArgument("empty key");
  if (key.size() > options_.max_key_size) return Status::InvalidArgument("key too large");
  std::unique_lock<std::mutex> wl(write_mu_);
  if (closed_.load()) return Status::Closed();
  Status s = MakeRoomForWrite(&wl);
  if (!s.ok()) return s;
  const SequenceNumber seq = last_seq_.load(std::memory_order_relaxed) + 1;
  mem_->Add(seq, kind, key, value);
  last_seq_.store(seq, std::memory_order_release);
  if (seq_out != nullptr) *seq_out = seq;
  return Status::OK();
}

Status DB::MakeRoomForWrite(std::unique_lock<std::mutex>* /*write_lock*/) {
  while (true) {
    if (mem_->ApproximateBytes() < options_.write_buffer_size) return Status::OK();
    std::unique_lock<std::mutex> l(mu_);
    if (!bg_error_.ok()) return bg_error_;
    if (options_.inline_compaction) {
      SwitchMemTableLocked();
      l.unlock();
      Status s = FlushOldestImm();
      if (!s.ok()) return s;
      return RunCompactionsInline();
    }
    if (static_cast<int>(imms_.size()) >= options_.max_immutable_memtables ||
        version_->L0TriggerFiles() >= options_.level0_stop_writes_trigger) {
      counters_.write_stalls.fetch_add(1, std::memory_order_relaxed);
      const uint64_t start = NowMicros();
      bg_cv_.notify_all();
      state_cv_.wait_for(l, std::chrono::milliseconds(100));
      counters_.stall_micros.fetch_add(NowMicros() - start, std::memory_order_relaxed);
      continue;
    }
    SwitchMemTableLocked();
    bg_cv_.notify_all();
    return Status::OK();
  }
}

void DB::TrackRead(std::string_view key, SequenceNumber seq) {
  tracker_->TrackRead(key, seq);
  if (options_.inline_compaction && tracker_->size() > tracker_->capacity()) {
    const auto floor_count = static_cast<size_t>(0.95 * static_cast<double>(tracker_->capacity()));
    tracker_->RunEvictionPass(tracker_->size() - floor_count);
  }
}

Status DB::Get(std::string_view key, std::string* value, ReadInfo* info) {
  if (closed_.load()) return Status::Closed();
  counters_.gets.fetch_add(1, std::memory_order_relaxed);
  const auto sv = GetSuperVersion();

  bool found = false;
  SequenceNumber seq = 0;
  ValueKind kind = ValueKind::kPut;
  int level = -2;
  ReadSource source = ReadSource::kNone;

  auto from_mem = [&](const MemTable& m) {
    auto hit = m.Get(key);
    if (!hit) return false;
    found = true;
    seq = hit->seqno;
    kind = hit->kind;
    if (kind == ValueKind::kPut) value->assign(hit->value);
    level = -1;
    source = ReadSource::kMemtable;
    return true;
  };

  if (!from_mem(*sv->mem)) {
    for (const auto& imm : sv->imms) {
      if (from_mem(*imm)) break;
    }
  }

  if (!found) {
    const uint64_t hash = Hash64(key);
    TableGetResult r;
    auto probe = [&](const FileMeta& f, int l) -> Status {
      Status s = f.table->Get(key, hash, l, &r);
      if (!s.ok()) return s;
      if (r.found) {
        found = true;
        seq = r.seqno;
        kind = r.kind;
        if (kind == ValueKind::kPut) *value = std::move(r.value);
        level = l;
        source = r.data_from_cache ? ReadSource::kBlockCache : ReadSource::kDevice;
      }
      return Status::OK();
    };
    const Version& v = *sv->version;
    for (const auto& f : v.files(0)) {
      if (key < f->smallest || key > f->largest) continue;
      Status s = probe(*f, 0);
      if (!s.ok()) return s;
      if (found) break;
    }
    for (int l = 1; !found && l < v.num_levels; ++l) {
      const FilePtr* f = v.FindFile(l, key);
      if (f == nullptr || key < (*f)->smallest) continue;
      Status s = probe(**f, l);
      if (!s.ok()) return s;
    }
  }

  if (!found || kind == ValueKind::kTombstone) {
    value->clear();
    return Status::NotFound();
  }
  counters_.gets_found.fetch_add(1, std::memory_order_relaxed);
  counters_.gets_by_level[static_cast<size_t>(level + 1)].fetch_add(1, std::memory_order_relaxed);
  counters_.gets_by_source[static_cast<size_t>(source)].fetch_add(1, std::memory_order_relaxed);
  if (info != nullptr) *info = ReadInfo{level, source, seq};
  if (options_.pinning_enabled) TrackRead(key, seq);
  return Status::OK();
}

Status DB::Scan(std::string_view start, size_t count,
                std::vector<std::pair<std::string, std::string>>* out) {
  out->clear();
  if (closed_.load()) return Status::Closed();
  counters_.scans.fetch_add(1, std::memory_order_relaxed);
  if (count == 0) return Status::OK();
  const auto sv = GetSuperVersion();
  std::vector<std::unique_ptr<RecordIterator>> children;
  children.push_back(sv->mem->NewIterator());
  for (const auto& imm : sv->imms) children.push_back(imm->NewIterator());
  const Version& v = *sv->version;
  for (const auto& f : v.files(0)) children.push_back(f->table->NewIterator(0));
  for (int l = 1; l < v.num_levels; ++l) {
    if (!v.files(l).empty()) children.push_back(std::make_unique<LevelIterator>(v.files(l), l));
  }
  MergingIterator it(std::move(children));
  std::string last;
  bool have_last = false;
  const bool track = options_.track_scans && options_.pinning_enabled;
  for (it.Seek(start); it.Valid() && out->size() < count; it.Next()) {
    if (have_last && it.key() == last) continue;
    last.assign(it.key());
    have_last = true;
    if (it.kind() == ValueKind::kPut) {
      out->emplace_back(std::string(it.key()), std::string(it.value()));
      if (track) TrackRead(it.key(), it.seqno());
    }
  }
  return it.status();
}

Status DB::OutputTable(int level, bool retained, std::string contents, const TableProps& props,
                       const std::vector<int8_t>& clocks, FilePtr* out) {
  const uint64_t id = NewFileId();
  const int tier = env_->TierForLevel(level);
  Status s = env_->WriteFile(tier, level, id, contents);
  if (!s.ok()) return s;
  std::shared_ptr<TierFile> file;
  s = env_->OpenFile(tier, id, &file);
  if (!s.ok()) return s;
  auto meta = std::make_shared<FileMeta>();
  s = Table::Open(env_.get(), cache_.get(), file, level, contents, &meta->table);
  if (!s.ok()) return s;
  meta->id = id;
  meta->level = level;
  meta->tier = tier;
  meta->size = contents.size();
  meta->entries = props.entries;
  meta->tombstones = props.tombstones;
  meta->smallest_seq = props.smallest_seq;
  meta->largest_seq = props.largest_seq;
  meta->smallest = props.smallest_key;
  meta->largest = props.largest_key;
  meta->score = ComputeScore(clocks, options_.score_weight);
  meta->retained = retained;
  *out = std::move(meta);
  return Status::OK();
}

Status DB::FlushOldestImm() {
  std::shared_ptr<MemTable> imm;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (imms_.empty()) return Status::OK();
    imm = imms_.front();
    flushing_ = true;
  }
  TableBuilder builder(options_.block_size, options_.bloom_bits_per_key);
  std::vector<int8_t> clocks;
  auto it = imm->NewIterator();
  std::string last;
  bool have_last = false;
  for (it->SeekToFirst(); it->Valid(); it->Next()) {
    if (have_last && it->key() == last) continue;
    last.assign(it->key());
    have_last = true;
    builder.Add(it->key(), it->seqno(), it->kind(), it->value());
    clocks.push_back(ClockOf(ScoringTracker(), it->key()));
  }
  Status s;
  FilePtr file;
  if (builder.entries() > 0) {
    TableProps props;
    std::string contents = builder.Finish(&props);
    s = OutputTable(0, false, std::move(contents), props, clocks, &file);
  }

  std::lock_guard<std::mutex> lock(mu_);
  flushing_ = false;
  if (!s.ok()) {
    bg_error_ = s;
    state_cv_.notify_all();
    return s;
  }
  imms_.pop_front();
  if (file) {
    VersionEdit edit;
    edit.added.push_back(file);
    s = InstallLocked(edit);
    last_flushed_ = file;
    counters_.flushes.fetch_add(1, std::memory_order_relaxed);
    counters_.flush_bytes.fetch_add(file->size, std::memory_order_relaxed);
  } else {
    PublishLocked();
  }
  bg_cv_.notify_all();
  state_cv_.notify_all();
  return s;
}

Status DB::InstallLocked(const VersionEdit& in) {
  VersionEdit edit = in;
  edit.next_file_id = next_file_id_.load();
  edit.last_seq = last_seq_.load();
  Status s = manifest_.Append(edit);
  if (!s.ok()) {
    bg_error_ = s;
    return s;
  }
  const auto old = version_;
  version_ = ApplyEdit(*old, edit);
  PublishLocked();

  std::unordered_set<uint64_t> kept;
  for (const auto& f : edit.added) kept.insert(f->id);
  for (const auto& d : edit.deleted) {
    if (kept.count(d.id) != 0) continue;
    for (const auto& f : old->files(d.level)) {
      if (f->id == d.id) {
        Status ds = env_->DeleteFile(f->tier, f->id);
        if (!ds.ok()) Log(LogLevel::kWarn, "delete obsolete file: " + ds.ToString());
        break;
      }
    }
  }
  return Status::OK();
}

void DB::RecordEventLocked(const CompactionEvent& e) {
  events_.push_back(e);
  if (event_log_ != nullptr) {
    std::fprintf(event_log_, "%s\n", CompactionEventCsv(e).c_str());
    std::fflush(event_log_);
  }
}

Status DB::RunPlan(const CompactionPlan& plan, uint64_t job_id, JobResult* result) {
  const uint64_t start = NowMicros();
  CompactionEvent& ev = result->event;
  ev.job_id = job_id;
  ev.level = plan.level;
  for (const auto& f : plan.upper) {
    ev.upper_inputs.push_back(f->id);
    ev.input_scores.push_back(f->score);
  }
  for (const auto& f : plan.lower) {
    ev.lower_inputs.push_back(f->id);
    ev.input_scores.push_back(f->score);
  }
  const PinPolicy policy = options_.pinning_enabled ? mapper_->CurrentPolicy() : PinPolicy{};
  ev.policy_boundary = policy.boundary;
  ev.policy_prob = policy.boundary_prob;
  const int out_level = plan.level + 1;
  VersionEdit& edit = result->edit;

  // Movable inputs are relinked without looking at their keys, so nothing
  // in them is pinned.
  const bool move = options_.trivial_move && plan.movable;
  if (move) {
    ev.trivial_move = true;
    const int new_tier = env_->TierForLevel(out_level);
    std::vector<FilePtr> copies;
    for (const auto& f : plan.upper) {
      auto m = std::make_shared<FileMeta>(*f);
      m->level = out_level;
      m->retained = false;
      if (new_tier != f->tier) {
        std::string contents;
        Status s = env_->ReadBlock(*f->table->file(), plan.level, 0, f->size, &contents,
                                   options_.inject_compaction_reads);
        if (s.ok()) {
          ev.bytes_read += f->size;
          m->id = NewFileId();
          m->tier = new_tier;
          s = env_->WriteFile(new_tier, out_level, m->id, contents);
        }
        std::shared_ptr<TierFile> file;
        if (s.ok()) s = env_->OpenFile(new_tier, m->id, &file);
        if (s.ok()) s = Table::Open(env_.get(), cache_.get(), file, out_level, contents, &m->table);
        if (!s.ok()) {
          for (const auto& c : copies) env_->DeleteFile(c->tier, c->id);
          return s;
        }
        ev.bytes_written += f->size;
        copies.push_back(m);
      }
      edit.deleted.push_back({f->level, f->id});
      edit.added.push_back(m);
    }
    ev.lower_outputs = plan.upper.size();
    ev.micros = NowMicros() - start;
    return Status::OK();
  }

  std::vector<std::unique_ptr<RecordIterator>> children;
  for (const auto* group : {&plan.upper, &plan.lower}) {
    for (const auto& f : *group) {
      std::unique_ptr<RecordIterator> it;
      Status s = f->table->NewSequentialIterator(f->level, options_.inject_compaction_reads, &it);
      if (!s.ok()) return s;
      ev.bytes_read += f->size;
      children.push_back(std::move(it));
    }
  }
  MergingIterator merged(std::move(children));
  PinDecider decider(tracker_.get(), policy, Mix64(options_.seed ^ (job_id * 0x9e3779b97f4a7c15ULL)));
  PinnedMergeOptions mo;
  mo.num_upper_children = plan.upper.size();
  mo.drop_tombstones = out_level == options_.num_levels - 1;
  mo.pinning = options_.pinning_enabled;
  if (plan.level > 0) mo.gap = plan.gap;
  // The room is in file bytes but the merge counts record bytes; index,
  // filter and block trailers would otherwise let a job retain as much as it
  // removes and re-trigger forever.
  uint64_t upper_file_bytes = 0;
  uint64_t upper_data_bytes = 0;
  for (const auto& f : plan.upper) {
    upper_file_bytes += f->size;
    upper_data_bytes += f->table->props().data_bytes;
  }
  mo.upper_room = upper_file_bytes == 0
                      ? 0
                      : static_cast<uint64_t>(static_cast<double>(plan.upper_room) *
                                              static_cast<double>(upper_data_bytes) /
                                              static_cast<double>(upper_file_bytes));

  OutputSink upper(this, plan.level, plan.level == 0, plan.level != 0);
  OutputSink lower(this, out_level, false, true);
  Status s = PinnedMerge(&merged, &decider, mo, &upper, &lower, &result->merge);
  if (s.ok()) s = upper.Finish();
  if (s.ok()) s = lower.Finish();
  if (!s.ok()) {
    upper.Abandon();
    lower.Abandon();
    return s;
  }
  for (const auto* group : {&plan.upper, &plan.lower}) {
    for (const auto& f : *group) edit.deleted.push_back({f->level, f->id});
  }
  for (const auto& f : upper.files()) edit.added.push_back(f);
  for (const auto& f : lower.files()) edit.added.push_back(f);

  const auto& m = result->merge;
  ev.upper_outputs = upper.files().size();
  ev.lower_outputs = lower.files().size();
  ev.records_in = m.input_records;
  ev.pinned = m.pinned;
  ev.up_moved = m.up_moved;
  ev.down = m.down;
  ev.superseded = m.superseded;
  ev.tombstones_dropped = m.tombstones_dropped;
  ev.bytes_written = upper.bytes() + lower.bytes();
  ev.micros = NowMicros() - start;
  return Status::OK();
}

Status DB::ExecutePlan(const CompactionPlan& plan, uint64_t job_id) {
  JobResult result;
  Status s = RunPlan(plan, job_id, &result);
  std::lock_guard<std::mutex> lock(mu_);
  if (s.ok()) s = InstallLocked(result.edit);
  if (s.ok()) {
    RecordEventLocked(result.event);
    const auto& ev = result.event;
    if (ev.trivial_move) {
      counters_.trivial_moves.fetch_add(1, std::memory_order_relaxed);
    } else {
      counters_.compactions.fetch_add(1, std::memory_order_relaxed);
      counters_.pinned.fetch_add(ev.pinned, std::memory_order_relaxed);
      counters_.up_moved.fetch_add(ev.up_moved, std::memory_order_relaxed);
    }
    counters_.compaction_bytes_read.fetch_add(ev.bytes_read, std::memory_order_relaxed);
    counters_.compaction_bytes_written.fetch_add(ev.bytes_written, std::memory_order_relaxed);
  } else {
    counters_.failed_jobs.fetch_add(1, std::memory_order_relaxed);
    Log(LogLevel::kWarn, "compaction job " + std::to_string(job_id) + " failed: " + s.ToString());
  }
  UnregisterPlan(plan, &running_);
  --running_jobs_;
  bg_cv_.notify_all();
  state_cv_.notify_all();
  return s;
}

void DB::FlushLoop() {
  std::unique_lock<std::mutex> l(mu_);
  while (true) {
    bg_cv_.wait(l, [&] { return !imms_.empty() || closing_; });
    if (imms_.empty()) {
      if (closing_) break;
      continue;
    }
    if (!bg_error_.ok()) {
      if (closing_) break;
      bg_cv_.wait_for(l, std::chrono::milliseconds(100));
      continue;
    }
    l.unlock();
    FlushOldestImm();
    l.lock();
  }
}

void DB::CompactionLoop() {
  const PickerConfig cfg = MakePickerConfig();
  std::unique_lock<std::mutex> l(mu_);
  while (!closing_) {
    std::optional<CompactionPlan> plan;
    if (bg_error_.ok()) plan = PickCompaction(*version_, cfg, running_);
    if (!plan) {
      bg_cv_.wait_for(l, std::chrono::milliseconds(200));
      continue;
    }
    RegisterPlan(*plan, &running_);
    ++running_jobs_;
    const uint64_t job_id = ++job_counter_;
    l.unlock();
    Status s = ExecutePlan(*plan, job_id);
    if (s.IsCapacityExceeded()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    l.lock();
    if (!s.ok() && !s.IsCapacityExceeded() && bg_error_.ok()) bg_error_ = s;
  }
}

Status DB::RunCompactionsInline() {
  const PickerConfig cfg = MakePickerConfig();
  while (true) {
    std::optional<CompactionPlan> plan;
    uint64_t job_id = 0;
    {
      std::lock_guard<std::mutex> lock(mu_);
      plan = PickCompaction(*version_, cfg, running_);
      if (!plan) return Status::OK();
      RegisterPlan(*plan, &running_);
      ++running_jobs_;
      job_id = ++job_counter_;
    }
    Status s = ExecutePlan(*plan, job_id);
    if (!s.ok()) return s;
  }
}

bool DB::IdleLocked() const {
  return imms_.empty() && !flushing_ && running_jobs_ == 0 &&
         !PickCompaction(*version_, MakePickerConfig(), running_);
}

Status DB::CompactUntilIdle() {
  if (closed_.load()) return Status::Closed();
  if (options_.inline_compaction) {
    std::lock_guard<std::mutex> wl(write_mu_);
    while (true) {
      {
        std::lock_guard<std::mutex> lock(mu_);
        if (imms_.empty()) break;
      }
      Status s = FlushOldestImm();
      if (!s.ok()) return s;
    }
    return RunCompactionsInline();
  }
  std::unique_lock<std::mutex> l(mu_);
  while (!IdleLocked()) {
    if (!bg_error_.ok()) return bg_error_;
    bg_cv_.notify_all();
    state_cv_.wait_for(l, std::chrono::milliseconds(20));
  }
  return bg_error_;
}

Status DB::CompactLevel(int level) {
  if (level < 0 || level + 1 >= options_.num_levels) {
    return Status::InvalidArgument("level has no level below it");
  }
  if (closed_.load()) return Status::Closed();
  const PickerConfig cfg = MakePickerConfig();
  while (true) {
    std::unique_lock<std::mutex> l(mu_);
    auto plan = PlanForLevel(*version_, cfg, running_, level);
    if (!plan) {
      if (version_->files(level).empty() || running_jobs_ == 0) return Status::OK();
      state_cv_.wait_for(l, std::chrono::milliseconds(20));
      continue;
    }
    RegisterPlan(*plan, &running_);
    ++running_jobs_;
    const uint64_t job_id = ++job_counter_;
    l.unlock();
    return ExecutePlan(*plan, job_id);
  }
}

Status DB::FlushMemTable(FilePtr* out) {
  if (out != nullptr) out->reset();
  std::unique_lock<std::mutex> wl(write_mu_);
  if (closed_.load()) return Status::Closed();
  bool switched = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!mem_->empty()) {
      SwitchMemTableLocked();
      switched = true;
      bg_cv_.notify_all();
    }
  }
  Status s;
  if (options_.inline_compaction) {
    while (s.ok()) {
      {
        std::lock_guard<std::mutex> lock(mu_);
        if (imms_.empty()) break;
      }
      s = FlushOldestImm();
    }
    FilePtr flushed;
    {
      std::lock_guard<std::mutex> lock(mu_);
      flushed = last_flushed_;
    }
    if (s.ok()) s = RunCompactionsInline();
    if (out != nullptr && switched) *out = flushed;
    return s;
  }
  std::unique_lock<std::mutex> l(mu_);
  state_cv_.wait(l, [&] { return (imms_.empty() && !flushing_) || !bg_error_.ok(); });
  if (!bg_error_.ok()) return bg_error_;
  if (out != nullptr && switched) *out = last_flushed_;
  return Status::OK();
}

Status DB::Close() {
  if (closed_.load()) return Status::OK();
  Status result;
  {
    std::unique_lock<std::mutex> wl(write_mu_);
    if (closed_.load()) return Status::OK();
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (mem_ && !mem_->empty()) SwitchMemTableLocked();
      bg_cv_.notify_all();
    }
    if (options_.inline_compaction) {
      while (true) {
        {
          std::lock_guard<std::mutex> lock(mu_);
          if (imms_.empty() || !bg_error_.ok()) break;
        }
        result = FlushOldestImm();
        if (!result.ok()) break;
      }
    } else {
      std::unique_lock<std::mutex> l(mu_);
      state_cv_.wait(l, [&] { return (imms_.empty() && !flushing_) || !bg_error_.ok(); });
      result = bg_error_;
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      closing_ = true;
    }
    bg_cv_.notify_all();
    closed_.store(true);
  }
  if (flush_thread_.joinable()) flush_thread_.join();
  for (auto& w : workers_) {
    if (w.joinable()) w.join();
  }
  workers_.clear();
  tracker_->StopBackground();
  std::lock_guard<std::mutex> lock(mu_);
  if (event_log_ != nullptr) {
    std::fclose(event_log_);
    event_log_ = nullptr;
  }
  return result;
}

DbStats DB::GetStats() const {
  DbStats st;
  st.puts = counters_.puts.load();
  st.deletes = counters_.deletes.load();
  st.gets = counters_.gets.load();
  st.gets_found = counters_.gets_found.load();
  st.scans = counters_.scans.load();
  for (size_t i = 0; i < st.gets_by_level.size(); ++i) {
    st.gets_by_level[i] = counters_.gets_by_level[i].load();
  }
  for (size_t i = 0; i < st.gets_by_source.size(); ++i) {
    st.gets_by_source[i] = counters_.gets_by_source[i].load();
  }
  st.flushes = counters_.flushes.load();
  st.flush_bytes = counters_.flush_bytes.load();
  st.compactions = counters_.compactions.load();
  st.trivial_moves = counters_.trivial_moves.load();
  st.compaction_bytes_read = counters_.compaction_bytes_read.load();
  st.compaction_bytes_written = counters_.compaction_bytes_written.load();
  st.pinned_records = counters_.pinned.load();
  st.up_moved_records = counters_.up_moved.load();
  st.write_stalls = counters_.write_stalls.load();
  st.stall_micros = counters_.stall_micros.load();
  st.failed_jobs = counters_.failed_jobs.load();
  const auto v = CurrentVersion();
  for (int l = 0; l < v->num_levels; ++l) {
    st.level_files.push_back(v->files(l).size());
    st.level_bytes.push_back(v->LevelBytes(l));
  }
  st.cache = cache_->Stats();
  return st;
}

void DB::ResetStats() {
  counters_.puts = 0;
  counters_.deletes = 0;
  counters_.gets = 0;
  counters_.gets_found = 0;
  counters_.scans = 0;
  for (auto& c : counters_.gets_by_level) c = 0;
  for (auto& c : counters_.gets_by_source) c = 0;
  counters_.flushes = 0;
  counters_.flush_bytes = 0;
  counters_.compactions = 0;
  counters_.trivial_moves = 0;
  counters_.compaction_bytes_read = 0;
  counters_.compaction_bytes_written = 0;
  counters_.pinned = 0;
  counters_.up_moved = 0;
  counters_.write_stalls = 0;
  counters_.stall_micros = 0;
  counters_.failed_jobs = 0;
  cache_->ResetStats();
  env_->ResetCounters();
  std::lock_guard<std::mutex> lock(mu_);
  events_.clear();
}

std::vector<CompactionEvent> DB::CompactionEvents() const {
  std::lock_guard<std::mutex> lock(mu_);
  return events_;
}

}  // namespace prism
