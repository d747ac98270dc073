#include "prism/tracker.h"

#include <algorithm>
#include <chrono>

#include "prism/mapper.h"

namespace prism {

namespace {
constexpr size_t kBucketsPerLock = 64;
}

Tracker::Tracker(TrackerOptions options, ClockHistogram* histogram)
    : options_(options), histogram_(histogram) {
  if (options_.shards == 0) options_.shards = 1;
  shards_ = std::make_unique<Shard[]>(options_.shards);
}

Tracker::~Tracker() { StopBackground(); }

Tracker::Shard& Tracker::ShardFor(std::string_view key) const {
  // High bits pick the shard; the map itself uses the low bits.
  return shards_[(Hash64(key) >> 40) % options_.shards];
}

ClockTransition Tracker::Refresh(std::atomic<uint8_t>& slot, uint8_t fingerprint) {
  uint8_t old = slot.load(std::memory_order_relaxed);
  uint8_t next;
  ClockTransition transition;
  do {
    if (clock_entry::Fingerprint(old) == fingerprint) {
      next = clock_entry::Pack(clock_entry::kMaxClock, fingerprint);
      transition = ClockTransition::kPromoted;
    } else {
      next = clock_entry::Pack(1, fingerprint);
      transition = ClockTransition::kResetAsNew;
    }
  } while (!slot.compare_exchange_weak(old, next, std::memory_order_relaxed));
  if (histogram_ != nullptr) {
    histogram_->ApplyDelta(clock_entry::Clock(old), clock_entry::Clock(next));
  }
  if (transition == ClockTransition::kPromoted) {
    promotions_.fetch_add(1, std::memory_order_relaxed);
  }
  return transition;
}

ClockTransition Tracker::TrackRead(std::string_view key, uint64_t seqno) {
  const uint8_t fp = VersionFingerprint(seqno);
  Shard& shard = ShardFor(key);
  {
    std::shared_lock<std::shared_mutex> lock(shard.mu);
    auto it = shard.map.find(key);
    if (it != shard.map.end()) return Refresh(it->second, fp);
  }
  std::unique_lock<std::shared_mutex> lock(shard.mu);
  auto [it, inserted] = shard.map.try_emplace(std::string(key), clock_entry::Pack(1, fp));
  if (!inserted) return Refresh(it->second, fp);
  // Accounted under the lock so an eviction pass cannot see the entry first.
  if (histogram_ != nullptr) histogram_->ApplyDelta(std::nullopt, uint8_t{1});
  const size_t now = size_.fetch_add(1, std::memory_order_relaxed) + 1;
  lock.unlock();

  inserts_.fetch_add(1, std::memory_order_relaxed);
  if (now > options_.capacity && !wake_pending_.exchange(true)) bg_cv_.notify_one();
  return ClockTransition::kInserted;
}

std::optional<TrackedValue> Tracker::Lookup(std::string_view key) const {
  lookups_.fetch_add(1, std::memory_order_relaxed);
  Shard& shard = ShardFor(key);
  std::shared_lock<std::shared_mutex> lock(shard.mu);
  auto it = shard.map.find(key);
  if (it == shard.map.end()) return std::nullopt;
  const uint8_t v = it->second.load(std::memory_order_relaxed);
  return TrackedValue{clock_entry::Clock(v), clock_entry::Fingerprint(v)};
}

size_t Tracker::RunEvictionPass(size_t target_count) {
  std::lock_guard<std::mutex> serial(evict_mu_);
  size_t removed = 0;
  size_t visited = 0;
  const size_t budget = 4 * size() + options_.shards * kBucketsPerLock;
  std::vector<std::string> victims;

  while (removed < target_count && visited < budget && size() > 0) {
    Shard& shard = shards_[hand_shard_];
    bool shard_done = false;
    {
      std::unique_lock<std::shared_mutex> lock(shard.mu);
      const size_t buckets = shard.map.bucket_count();
      const size_t end = std::min(buckets, hand_bucket_ + kBucketsPerLock);
      size_t b = hand_bucket_;
      for (; b < end && removed < target_count; ++b) {
        victims.clear();
        for (auto it = shard.map.begin(b); it != shard.map.end(b); ++it) {
          if (removed + victims.size() >= target_count) break;
          ++visited;
          auto& slot = it->second;
          const uint8_t v = slot.load(std::memory_order_relaxed);
          const uint8_t clock = clock_entry::Clock(v);
          if (clock == 0) {
            victims.push_back(it->first);
          } else {
            // Readers only touch slots under the shared lock, so this is the
            // sole writer while we hold the exclusive lock.
            slot.store(clock_entry::Pack(clock - 1, clock_entry::Fingerprint(v)),
                       std::memory_order_relaxed);
            if (histogram_ != nullptr) histogram_->ApplyDelta(clock, uint8_t(clock - 1));
          }
        }
        for (const auto& k : victims) {
          auto it = shard.map.find(k);
          if (histogram_ != nullptr) {
            histogram_->ApplyDelta(clock_entry::Clock(it->second.load()), std::nullopt);
          }
          shard.map.erase(it);
          size_.fetch_sub(1, std::memory_order_relaxed);
          ++removed;
        }
        if (removed >= target_count) break;
      }
      hand_bucket_ = b;
      shard_done = hand_bucket_ >= buckets;
    }
    if (shard_done) {
      hand_bucket_ = 0;
      hand_shard_ = (hand_shard_ + 1) % options_.shards;
    }
  }
  evictions_.fetch_add(removed, std::memory_order_relaxed);
  return removed;
}

std::vector<uint8_t> Tracker::PackedValues() const {
  std::vector<uint8_t> out;
  for (size_t s = 0; s < options_.shards; ++s) {
    std::shared_lock<std::shared_mutex> lock(shards_[s].mu);
    for (const auto& [k, v] : shards_[s].map) out.push_back(v.load(std::memory_order_relaxed));
  }
  return out;
}

void Tracker::StartBackground() {
  if (!options_.background_eviction || bg_.joinable()) return;
  {
    std::lock_guard<std::mutex> lock(bg_mu_);
    stop_ = false;
  }
  bg_ = std::thread([this] { MaintenanceLoop(); });
}

void Tracker::StopBackground() {
  {
    std::lock_guard<std::mutex> lock(bg_mu_);
    stop_ = true;
  }
  bg_cv_.notify_all();
  if (bg_.joinable()) bg_.join();
}

void Tracker::MaintenanceLoop() {
  std::unique_lock<std::mutex> lock(bg_mu_);
  while (!stop_) {
    bg_cv_.wait_for(lock, std::chrono::milliseconds(5), [this] {
      return stop_ || wake_pending_.load() || size() > options_.capacity;
    });
    if (stop_) break;
    wake_pending_.store(false);
    lock.unlock();
    const auto floor_count = static_cast<size_t>(options_.evict_to * static_cast<double>(options_.capacity));
    while (size() > floor_count) {
      const size_t excess = size() - floor_count;
      if (RunEvictionPass(std::min<size_t>(excess, 4096)) == 0) break;
    }
    lock.lock();
    idle_cv_.notify_all();
  }
}

void Tracker::WaitForEviction() {
  while (size() > options_.capacity && bg_.joinable()) {
    std::unique_lock<std::mutex> lock(bg_mu_);
    idle_cv_.wait_for(lock, std::chrono::milliseconds(2));
  }
}

}  // namespace prism
