#pragma once

// Simulated heterogeneous storage. Every tier is a directory on the local
// disk; reads and writes go through real file I/O and then pay an injected
// delay derived from the tier's nominal device latencies.

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "prism/status.h"

namespace prism {

inline constexpr int kMaxLevels = 8;
inline constexpr int kMaxTiers = 8;
inline constexpr uint64_t kReadUnitBytes = 4096;
inline constexpr uint64_t kWriteUnitBytes = 64ull << 20;

struct TierSpec {
  std::string name;               // NVM, TLC, QLC or custom
  char code = '?';                // letter used in mapping strings
  double read_latency_us = 0;     // per 4 KB read
  double write_latency_us = 0;    // per 64 MB written
  double cost_per_gb = 0;
  double pe_cycles = 0;
  uint64_t capacity_bytes = 0;    // 0 means unbounded
  std::string dir;                // subdirectory under the store root
};

// NVM / TLC / QLC device parameters (Optane 900P, 760P, 660P class).
TierSpec NvmTier();
TierSpec TlcTier();
TierSpec QlcTier();
std::vector<TierSpec> DefaultTiers();

Status ValidateTier(const TierSpec& spec);

// Level -> tier assignment, written as one letter per level ("NNNTQ").
class TierMapping {
 public:
  static Status Parse(std::string_view config, const std::vector<TierSpec>& tiers,
                      TierMapping* out);

  int TierForLevel(int level) const { return level_tier_.at(static_cast<size_t>(level)); }
  int num_levels() const { return static_cast<int>(level_tier_.size()); }
  const std::string& config() const { return config_; }

 private:
  std::string config_;
  std::vector<int> level_tier_;
};

// Open SST file handle on a tier.
class TierFile {
 public:
  TierFile(int fd, int tier, uint64_t id, uint64_t size) : fd_(fd), tier_(tier), id_(id), size_(size) {}
  ~TierFile();
  TierFile(const TierFile&) = delete;
  TierFile& operator=(const TierFile&) = delete;

  int tier() const { return tier_; }
  uint64_t id() const { return id_; }
  uint64_t size() const { return size_; }
  int fd() const { return fd_; }

 private:
  int fd_;
  int tier_;
  uint64_t id_;
  uint64_t size_;
};

struct TierIoRow {
  int level;
  int tier;
  uint64_t block_reads;
  uint64_t read_bytes;
  uint64_t write_bytes;
};

struct WearRow {
  std::string tier;
  uint64_t bytes_written;
  uint64_t capacity_bytes;
  double pe_cycles;
  double wear;  // bytes_written / (capacity * pe); 0 when unbounded
};

// Sleeps for the requested duration with sub-10us accuracy: coarse sleep
// followed by a yielding wait on the steady clock for the last stretch.
void InjectDelay(double micros, double spin_margin_us);

class TierEnv {
 public:
  // inject=false is passthrough mode; PRISM_NO_INJECTION=1 forces it.
  TierEnv(std::filesystem::path root, std::vector<TierSpec> tiers, TierMapping mapping,
          bool inject, double spin_margin_us = 12.0);

  Status Init();

  const std::vector<TierSpec>& tiers() const { return tiers_; }
  const TierMapping& mapping() const { return mapping_; }
  int TierForLevel(int level) const { return mapping_.TierForLevel(level); }
  bool injecting() const { return inject_; }
  std::filesystem::path FilePath(int tier, uint64_t file_id) const;

  // Persists a whole SST on the tier, charges the wear ledger and pays the
  // proportional write delay.
  Status WriteFile(int tier, int level, uint64_t file_id, std::string_view contents);
  Status OpenFile(int tier, uint64_t file_id, std::shared_ptr<TierFile>* out) const;
  Status DeleteFile(int tier, uint64_t file_id);
  // Registers a file already on disk (used when reopening a store).
  void AddResident(int tier, uint64_t bytes);

  // Reads [offset, offset+len) and pays read_latency * ceil(len / 4 KB)
  // unless pay_latency is false.
  Status ReadBlock(const TierFile& file, int level, uint64_t offset, size_t len,
                   std::string* out, bool pay_latency = true);

  double ReadDelayMicros(int tier, size_t len) const;
  double WriteDelayMicros(int tier, size_t len) const;

  uint64_t ResidentBytes(int tier) const;
  uint64_t BytesWritten(int tier) const;
  std::vector<WearRow> Wear() const;
  std::vector<TierIoRow> IoRows() const;
  uint64_t TotalBlockReads() const;
  void ResetCounters();

 private:
  struct Counters {
    std::atomic<uint64_t> block_reads{0};
    std::atomic<uint64_t> read_bytes{0};
    std::atomic<uint64_t> write_bytes{0};
  };

  std::filesystem::path root_;
  std::vector<TierSpec> tiers_;
  TierMapping mapping_;
  bool inject_;
  double spin_margin_us_;
  std::array<std::atomic<uint64_t>, kMaxTiers> resident_{};
  std::array<std::atomic<uint64_t>, kMaxTiers> written_{};
  std::array<std::array<Counters, kMaxTiers>, kMaxLevels> io_{};
};

}  // namespace prism
