#include "prism/tiers.h"

#include <fcntl.h>
#include <sched.h>
#include <sys/prctl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <thread>

namespace prism {

TierSpec NvmTier() { return {"NVM", 'N', 26.0, 121.0, 1.3, 18000, 0, "nvm"}; }
TierSpec TlcTier() { return {"TLC", 'T', 195.0, 216.0, 0.4, 540, 0, "tlc"}; }
TierSpec QlcTier() { return {"QLC", 'Q', 391.0, 456.0, 0.1, 200, 0, "qlc"}; }
std::vector<TierSpec> DefaultTiers() { return {NvmTier(), TlcTier(), QlcTier()}; }

Status ValidateTier(const TierSpec& spec) {
  if (!(spec.read_latency_us > 0) || !(spec.write_latency_us > 0) || !(spec.cost_per_gb > 0) ||
      !(spec.pe_cycles > 0)) {
    return Status::InvalidArgument("tier " + spec.name +
                                   ": latencies, cost and endurance must be positive");
  }
  if (spec.dir.empty()) return Status::InvalidArgument("tier " + spec.name + ": empty directory");
  return Status::OK();
}

Status TierMapping::Parse(std::string_view config, const std::vector<TierSpec>& tiers,
                          TierMapping* out) {
  if (config.empty() || config.size() > kMaxLevels) {
    return Status::InvalidArgument("tier mapping must have 1..8 letters");
  }
  TierMapping m;
  m.config_ = std::string(config);
  for (char c : config) {
    int found = -1;
    for (size_t t = 0; t < tiers.size(); ++t) {
      if (tiers[t].code == c) found = static_cast<int>(t);
    }
    if (found < 0) return Status::InvalidArgument(std::string("unknown tier letter '") + c + "'");
    m.level_tier_.push_back(found);
  }
  *out = std::move(m);
  return Status::OK();
}

TierFile::~TierFile() {
  if (fd_ >= 0) ::close(fd_);
}

void InjectDelay(double micros, double spin_margin_us) {
  if (!(micros > 0)) return;
  thread_local bool slack_set = false;
  if (!slack_set) {
    ::prctl(PR_SET_TIMERSLACK, 1UL, 0, 0, 0);
    slack_set = true;
  }
  using Clock = std::chrono::steady_clock;
  const auto deadline =
      Clock::now() + std::chrono::nanoseconds(static_cast<int64_t>(micros * 1000.0));
  if (micros > spin_margin_us) {
    std::this_thread::sleep_for(
        std::chrono::nanoseconds(static_cast<int64_t>((micros - spin_margin_us) * 1000.0)));
  }
  while (Clock::now() < deadline) ::sched_yield();
}

TierEnv::TierEnv(std::filesystem::path root, std::vector<TierSpec> tiers, TierMapping mapping,
                 bool inject, double spin_margin_us)
    : root_(std::move(root)),
      tiers_(std::move(tiers)),
      mapping_(std::move(mapping)),
      inject_(inject),
      spin_margin_us_(spin_margin_us) {
  const char* env = std::getenv("PRISM_NO_INJECTION");
  if (env != nullptr && env[0] != '\0' && env[0] != '0') inject_ = false;
}

Status TierEnv::Init() {
  if (tiers_.size() > kMaxTiers) return Status::InvalidArgument("too many tiers");
  for (const auto& t : tiers_) {
    Status s = ValidateTier(t);
    if (!s.ok()) return s;
    std::error_code ec;
    std::filesystem::create_directories(root_ / t.dir, ec);
    if (ec) return Status::IOError("mkdir " + (root_ / t.dir).string() + ": " + ec.message());
  }
  return Status::OK();
}

std::filesystem::path TierEnv::FilePath(int tier, uint64_t file_id) const {
  char name[32];
  std::snprintf(name, sizeof(name), "%06llu.sst", static_cast<unsigned long long>(file_id));
  return root_ / tiers_.at(static_cast<size_t>(tier)).dir / name;
}

double TierEnv::ReadDelayMicros(int tier, size_t len) const {
  const auto units = (static_cast<uint64_t>(len) + kReadUnitBytes - 1) / kReadUnitBytes;
  return tiers_[static_cast<size_t>(tier)].read_latency_us * static_cast<double>(units);
}

double TierEnv::WriteDelayMicros(int tier, size_t len) const {
  return tiers_[static_cast<size_t>(tier)].write_latency_us * static_cast<double>(len) /
         static_cast<double>(kWriteUnitBytes);
}

Status TierEnv::WriteFile(int tier, int level, uint64_t file_id, std::string_view contents) {
  const auto& spec = tiers_.at(static_cast<size_t>(tier));
  const uint64_t size = contents.size();
  auto& resident = resident_[static_cast<size_t>(tier)];
  uint64_t cur = resident.load();
  do {
    if (spec.capacity_bytes != 0 && cur + size > spec.capacity_bytes) {
      return Status::CapacityExceeded("tier " + spec.name + " full");
    }
  } while (!resident.compare_exchange_weak(cur, cur + size));

  const auto path = FilePath(tier, file_id);
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) {
    resident.fetch_sub(size);
    return Status::IOError(path.string() + ": " + std::strerror(errno));
  }
  const char* p = contents.data();
  size_t left = contents.size();
  while (left > 0) {
    const ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      ::close(fd);
      ::unlink(path.c_str());
      resident.fetch_sub(size);
      return Status::IOError(path.string() + ": " + std::strerror(err));
    }
    p += n;
    left -= static_cast<size_t>(n);
  }
  ::close(fd);
  written_[static_cast<size_t>(tier)].fetch_add(size, std::memory_order_relaxed);
  if (level >= 0 && level < kMaxLevels) {
    io_[static_cast<size_t>(level)][static_cast<size_t>(tier)].write_bytes.fetch_add(
        size, std::memory_order_relaxed);
  }
  if (inject_) InjectDelay(WriteDelayMicros(tier, size), spin_margin_us_);
  return Status::OK();
}

Status TierEnv::OpenFile(int tier, uint64_t file_id, std::shared_ptr<TierFile>* out) const {
  const auto path = FilePath(tier, file_id);
  const int fd = ::open(path.c_str(), O_RDONLY);
  if (fd < 0) return Status::IOError(path.string() + ": " + std::strerror(errno));
  const off_t size = ::lseek(fd, 0, SEEK_END);
  if (size < 0) {
    ::close(fd);
    return Status::IOError(path.string() + ": lseek failed");
  }
  *out = std::make_shared<TierFile>(fd, tier, file_id, static_cast<uint64_t>(size));
  return Status::OK();
}

Status TierEnv::DeleteFile(int tier, uint64_t file_id) {
  const auto path = FilePath(tier, file_id);
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) return Status::IOError(path.string() + ": " + ec.message());
  if (::unlink(path.c_str()) != 0) return Status::IOError(path.string() + ": unlink failed");
  resident_[static_cast<size_t>(tier)].fetch_sub(size);
  return Status::OK();
}

void TierEnv::AddResident(int tier, uint64_t bytes) {
  resident_[static_cast<size_t>(tier)].fetch_add(bytes);
}

Status TierEnv::ReadBlock(const TierFile& file, int level, uint64_t offset, size_t len,
                          std::string* out, bool pay_latency) {
  out->resize(len);
  size_t done = 0;
  while (done < len) {
    const ssize_t n = ::pread(file.fd(), out->data() + done, len - done,
                              static_cast<off_t>(offset + done));
    if (n < 0) {
      if (errno == EINTR) continue;
      return Status::IOError(std::string("pread: ") + std::strerror(errno));
    }
    if (n == 0) return Status::Corruption("short read past end of file");
    done += static_cast<size_t>(n);
  }
  if (level >= 0 && level < kMaxLevels) {
    auto& c = io_[static_cast<size_t>(level)][static_cast<size_t>(file.tier())];
    c.block_reads.fetch_add((len + kReadUnitBytes - 1) / kReadUnitBytes,
                            std::memory_order_relaxed);
    c.read_bytes.fetch_add(len, std::memory_order_relaxed);
  }
  if (inject_ && pay_latency) InjectDelay(ReadDelayMicros(file.tier(), len), spin_margin_us_);
  return Status::OK();
}

uint64_t TierEnv::ResidentBytes(int tier) const {
  return resident_[static_cast<size_t>(tier)].load();
}

uint64_t TierEnv::BytesWritten(int tier) const {
  return written_[static_cast<size_t>(tier)].load();
}

std::vector<WearRow> TierEnv::Wear() const {
  std::vector<WearRow> rows;
  for (size_t t = 0; t < tiers_.size(); ++t) {
    const auto& spec = tiers_[t];
    const uint64_t w = written_[t].load();
    const double wear = spec.capacity_bytes == 0
                            ? 0.0
                            : static_cast<double>(w) /
                                  (static_cast<double>(spec.capacity_bytes) * spec.pe_cycles);
    rows.push_back({spec.name, w, spec.capacity_bytes, spec.pe_cycles, wear});
  }
  return rows;
}

std::vector<TierIoRow> TierEnv::IoRows() const {
  std::vector<TierIoRow> rows;
  for (int level = 0; level < mapping_.num_levels(); ++level) {
    for (size_t t = 0; t < tiers_.size(); ++t) {
      const auto& c = io_[static_cast<size_t>(level)][t];
      rows.push_back({level, static_cast<int>(t), c.block_reads.load(), c.read_bytes.load(),
                      c.write_bytes.load()});
    }
  }
  return rows;
}

uint64_t TierEnv::TotalBlockReads() const {
  uint64_t total = 0;
  for (const auto& level : io_) {
    for (const auto& c : level) total += c.block_reads.load();
  }
  return total;
}

void TierEnv::ResetCounters() {
  for (auto& level : io_) {
    for (auto& c : level) {
      c.block_reads = 0;
      c.read_bytes = 0;
      c.write_bytes = 0;
    }
  }
}

}  // namespace prism
