#pragma once

// Sharded LRU cache of parsed SST blocks keyed by (file id, block offset).

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "prism/engine/block.h"

namespace prism {

struct CacheKindStats {
  uint64_t hits = 0;
  uint64_t misses = 0;
};

struct BlockCacheStats {
  std::array<CacheKindStats, kNumBlockKinds> by_kind{};
  uint64_t inserts = 0;
  uint64_t evictions = 0;
  size_t usage = 0;
  size_t capacity = 0;
};

class BlockCache {
 public:
  // Each shard holds capacity / shards bytes.
  BlockCache(size_t capacity_bytes, size_t shards);

  // Counts a hit or a miss for the block kind.
  std::shared_ptr<const Block> Lookup(uint64_t file_id, uint64_t offset, BlockKind kind);
  // Blocks larger than a shard are not cached.
  void Insert(uint64_t file_id, uint64_t offset, std::shared_ptr<const Block> block);

  size_t usage() const;
  size_t capacity() const { return capacity_; }
  BlockCacheStats Stats() const;
  void ResetStats();
  // Keys from least to most recently used, shard by shard.
  std::vector<std::pair<uint64_t, uint64_t>> LruOrder() const;

 private:
  struct Key {
    uint64_t file;
    uint64_t offset;
    bool operator==(const Key& o) const { return file == o.file && offset == o.offset; }
  };
  struct KeyHash {
    size_t operator()(const Key& k) const;
  };
  struct Entry {
    Key key;
    std::shared_ptr<const Block> block;
    size_t charge;
  };
  struct Shard {
    mutable std::mutex mu;
    std::list<Entry> lru;  // front = most recent
    std::unordered_map<Key, std::list<Entry>::iterator, KeyHash> map;
    size_t usage = 0;
  };

  Shard& ShardFor(const Key& k);

  size_t capacity_;
  size_t shard_capacity_;
  std::vector<std::unique_ptr<Shard>> shards_;
  std::array<std::atomic<uint64_t>, kNumBlockKinds> hits_{};
  std::array<std::atomic<uint64_t>, kNumBlockKinds> misses_{};
  std::atomic<uint64_t> inserts_{0};
  std::atomic<uint64_t> evictions_{0};
};

}  // namespace prism
