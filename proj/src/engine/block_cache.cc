#include "prism/engine/block_cache.h"

#include "prism/hash.h"

namespace prism {

size_t BlockCache::KeyHash::operator()(const Key& k) const {
  return Mix64(k.file * 0x9e3779b97f4a7c15ULL ^ k.offset);
}

BlockCache::BlockCache(size_t capacity_bytes, size_t shards) : capacity_(capacity_bytes) {
  if (shards == 0) shards = 1;
  shard_capacity_ = capacity_bytes / shards;
  for (size_t i = 0; i < shards; ++i) shards_.push_back(std::make_unique<Shard>());
}

BlockCache::Shard& BlockCache::ShardFor(const Key& k) {
  return *shards_[(KeyHash()(k) >> 32) % shards_.size()];
}

std::shared_ptr<const Block> BlockCache::Lookup(uint64_t file_id, uint64_t offset,
                                                BlockKind kind) {
  const Key key{file_id, offset};
  Shard& s = ShardFor(key);
  std::shared_ptr<const Block> result;
  {
    std::lock_guard<std::mutex> lock(s.mu);
    auto it = s.map.find(key);
    if (it != s.map.end()) {
      s.lru.splice(s.lru.begin(), s.lru, it->second);
      result = it->second->block;
    }
  }
  auto& counter = result ? hits_ : misses_;
  counter[static_cast<size_t>(kind)].fetch_add(1, std::memory_order_relaxed);
  return result;
}

void BlockCache::Insert(uint64_t file_id, uint64_t offset, std::shared_ptr<const Block> block) {
  const size_t charge = block->charge();
  if (charge > shard_capacity_) return;
  const Key key{file_id, offset};
  Shard& s = ShardFor(key);
  std::lock_guard<std::mutex> lock(s.mu);
  auto it = s.map.find(key);
  if (it != s.map.end()) {
    s.usage -= it->second->charge;
    s.lru.erase(it->second);
    s.map.erase(it);
  }
  while (!s.lru.empty() && s.usage + charge > shard_capacity_) {
    const Entry& victim = s.lru.back();
    s.usage -= victim.charge;
    s.map.erase(victim.key);
    s.lru.pop_back();
    evictions_.fetch_add(1, std::memory_order_relaxed);
  }
  s.lru.push_front(Entry{key, std::move(block), charge});
  s.map.emplace(key, s.lru.begin());
  s.usage += charge;
  inserts_.fetch_add(1, std::memory_order_relaxed);
}

size_t BlockCache::usage() const {
  size_t total = 0;
  for (const auto& s : shards_) {
    std::lock_guard<std::mutex> lock(s->mu);
    total += s->usage;
  }
  return total;
}

BlockCacheStats BlockCache::Stats() const {
  BlockCacheStats st;
  for (size_t k = 0; k < kNumBlockKinds; ++k) {
    st.by_kind[k].hits = hits_[k].load();
    st.by_kind[k].misses = misses_[k].load();
  }
  st.inserts = inserts_.load();
  st.evictions = evictions_.load();
  st.usage = usage();
  st.capacity = capacity_;
  return st;
}

void BlockCache::ResetStats() {
  for (size_t k = 0; k < kNumBlockKinds; ++k) {
    hits_[k] = 0;
    misses_[k] = 0;
  }
  inserts_ = 0;
  evictions_ = 0;
}

std::vector<std::pair<uint64_t, uint64_t>> BlockCache::LruOrder() const {
  std::vector<std::pair<uint64_t, uint64_t>> out;
  for (const auto& s : shards_) {
    std::lock_guard<std::mutex> lock(s->mu);
    for (auto it = s->lru.rbegin(); it != s->lru.rend(); ++it) {
      out.emplace_back(it->key.file, it->key.offset);
    }
  }
  return out;
}

}  // namespace prism
