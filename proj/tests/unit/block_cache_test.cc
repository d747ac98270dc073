#include <gtest/gtest.h>

#include <list>
#include <random>

#include "prism/engine/block_cache.h"

namespace prism {
namespace {

std::shared_ptr<const Block> MakeBlock(size_t value_bytes) {
  BlockBuilder b;
  b.Add("k", PackTag(1, ValueKind::kPut), std::string(value_bytes, 'x'));
  std::shared_ptr<const Block> out;
  EXPECT_TRUE(Block::Parse(b.Finish(), BlockKind::kData, &out).ok());
  return out;
}

TEST(BlockCache, HitMissAccountingByKind) {
  BlockCache c(1 << 20, 1);
  EXPECT_FALSE(c.Lookup(1, 0, BlockKind::kData));
  c.Insert(1, 0, MakeBlock(100));
  EXPECT_TRUE(c.Lookup(1, 0, BlockKind::kData));
  EXPECT_FALSE(c.Lookup(1, 4096, BlockKind::kIndex));
  const auto st = c.Stats();
  EXPECT_EQ(st.by_kind[0].hits, 1u);
  EXPECT_EQ(st.by_kind[0].misses, 1u);
  EXPECT_EQ(st.by_kind[1].misses, 1u);
  EXPECT_EQ(st.inserts, 1u);
  c.ResetStats();
  EXPECT_EQ(c.Stats().by_kind[0].hits, 0u);
}

// Single shard against a reference LRU list of equal-size blocks.
TEST(BlockCache, MatchesReferenceLru) {
  const auto proto = MakeBlock(1000);
  const size_t charge = proto->charge();
  const size_t slots = 16;
  BlockCache c(charge * slots, 1);
  std::list<uint64_t> ref;  // front = most recent
  std::mt19937_64 rng(5);
  for (int step = 0; step < 5000; ++step) {
    const uint64_t key = rng() % 40;
    const bool hit = c.Lookup(key, 0, BlockKind::kData) != nullptr;
    auto it = std::find(ref.begin(), ref.end(), key);
    ASSERT_EQ(hit, it != ref.end()) << step;
    if (hit) {
      ref.erase(it);
      ref.push_front(key);
    } else {
      c.Insert(key, 0, MakeBlock(1000));
      ref.push_front(key);
      if (ref.size() > slots) ref.pop_back();
    }
    ASSERT_LE(c.usage(), c.capacity());
  }
  const auto order = c.LruOrder();
  std::vector<uint64_t> got;
  for (const auto& [f, off] : order) got.push_back(f);
  std::vector<uint64_t> want(ref.rbegin(), ref.rend());
  EXPECT_EQ(got, want);
}

TEST(BlockCache, OversizedBlockNotCached) {
  BlockCache c(8192, 4);  // 2 KB per shard
  c.Insert(1, 0, MakeBlock(5000));
  EXPECT_FALSE(c.Lookup(1, 0, BlockKind::kData));
  EXPECT_EQ(c.usage(), 0u);
}

}  // namespace
}  // namespace prism
