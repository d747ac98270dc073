#include <gtest/gtest.h>

#include <random>

#include "prism/engine/block.h"
#include "prism/engine/bloom.h"
#include "prism/engine/table.h"
#include "prism/hash.h"
#include "test_util.h"

namespace prism {
namespace {

using testing::TempDir;

TEST(Bloom, NoFalseNegativesAndLowFalsePositives) {
  std::vector<uint64_t> hashes;
  for (int i = 0; i < 10000; ++i) hashes.push_back(Hash64("in" + std::to_string(i)));
  const std::string filter = BuildBloomFilter(hashes, 10);
  for (uint64_t h : hashes) ASSERT_TRUE(BloomMayContain(filter, h));
  int fp = 0;
  for (int i = 0; i < 10000; ++i) fp += BloomMayContain(filter, Hash64("out" + std::to_string(i)));
  EXPECT_LT(fp, 200);  // ~1% expected at 10 bits per key
  EXPECT_EQ(BloomProbes(10), 7);
}

TEST(Block, SealDetectsCorruption) {
  BlockBuilder b;
  b.Add("k1", PackTag(1, ValueKind::kPut), "v1");
  b.Add("k2", PackTag(2, ValueKind::kTombstone), "");
  std::string raw = b.Finish();
  std::string_view payload;
  ASSERT_TRUE(UnsealBlock(raw, &payload).ok());
  std::shared_ptr<const Block> blk;
  ASSERT_TRUE(Block::Parse(raw, BlockKind::kData, &blk).ok());
  ASSERT_EQ(blk->num_entries(), 2u);
  EXPECT_EQ(blk->Entry(1).key, "k2");
  EXPECT_EQ(TagKind(blk->Entry(1).tag), ValueKind::kTombstone);
  EXPECT_EQ(blk->LowerBound("k15"), 1u);
  EXPECT_EQ(blk->LowerBound("z"), 2u);

  raw[3] ^= 0x40;
  EXPECT_TRUE(UnsealBlock(raw, &payload).IsCorruption());
}

TEST(Block, BuilderSizePrediction) {
  BlockBuilder b;
  for (int i = 0; i < 50; ++i) {
    const std::string k = "key" + std::to_string(i);
    const size_t predicted = b.SizeWith(k.size(), 100);
    b.Add(k, PackTag(static_cast<SequenceNumber>(i), ValueKind::kPut), std::string(100, 'v'));
    EXPECT_EQ(b.CurrentSize(), predicted);
  }
}

struct TableFixture : ::testing::Test {
  TempDir dir{"table"};
  std::unique_ptr<TierEnv> env;
  std::unique_ptr<BlockCache> cache;

  void SetUp() override {
    TierMapping m;
    ASSERT_TRUE(TierMapping::Parse("NNNTQ", DefaultTiers(), &m).ok());
    env = std::make_unique<TierEnv>(dir.path(), DefaultTiers(), m, false);
    ASSERT_TRUE(env->Init().ok());
    cache = std::make_unique<BlockCache>(1 << 20, 4);
  }

  std::shared_ptr<Table> Build(uint64_t id, int level, int n, bool pass_contents,
                               TableProps* props_out = nullptr) {
    TableBuilder b(4096, 10);
    for (int i = 0; i < n; ++i) {
      char key[16];
      std::snprintf(key, sizeof(key), "k%06d", i * 2);
      const ValueKind kind = i % 7 == 3 ? ValueKind::kTombstone : ValueKind::kPut;
      b.Add(key, 1000 + static_cast<SequenceNumber>(i), kind,
            kind == ValueKind::kPut ? std::string(200, static_cast<char>('a' + i % 26)) : "");
    }
    TableProps props;
    std::string contents = b.Finish(&props);
    if (props_out) *props_out = props;
    const int tier = env->TierForLevel(level);
    EXPECT_TRUE(env->WriteFile(tier, level, id, contents).ok());
    std::shared_ptr<TierFile> f;
    EXPECT_TRUE(env->OpenFile(tier, id, &f).ok());
    std::shared_ptr<Table> t;
    Status s = Table::Open(env.get(), cache.get(), f, level,
                           pass_contents ? std::string_view(contents) : std::string_view(), &t);
    EXPECT_TRUE(s.ok()) << s.ToString();
    return t;
  }
};

TEST_F(TableFixture, PropsAndLayout) {
  TableProps props;
  auto t = Build(1, 4, 500, true, &props);
  ASSERT_TRUE(t);
  EXPECT_EQ(props.entries, 500u);
  EXPECT_EQ(props.tombstones, 500u / 7 + (500 % 7 > 3 ? 1 : 0));
  EXPECT_EQ(props.smallest_key, "k000000");
  EXPECT_EQ(props.largest_key, "k000998");
  EXPECT_EQ(props.smallest_seq, 1000u);
  EXPECT_EQ(props.largest_seq, 1499u);
  EXPECT_GT(props.data_blocks, 10u);
  // reopened from disk the meta block gives the same props
  auto t2 = Build(2, 4, 500, false);
  EXPECT_EQ(t2->props().entries, 500u);
  EXPECT_EQ(t2->props().largest_key, "k000998");
}

TEST_F(TableFixture, PointLookups) {
  auto t = Build(3, 3, 800, false);
  for (int i = 0; i < 800; ++i) {
    char key[16];
    std::snprintf(key, sizeof(key), "k%06d", i * 2);
    TableGetResult r;
    ASSERT_TRUE(t->Get(key, Hash64(key), 3, &r).ok());
    ASSERT_TRUE(r.found) << key;
    EXPECT_EQ(r.seqno, 1000u + static_cast<uint64_t>(i));
    if (i % 7 == 3) {
      EXPECT_EQ(r.kind, ValueKind::kTombstone);
    } else {
      EXPECT_EQ(r.value, std::string(200, static_cast<char>('a' + i % 26)));
    }
    // odd keys are absent
    std::snprintf(key, sizeof(key), "k%06d", i * 2 + 1);
    TableGetResult miss;
    ASSERT_TRUE(t->Get(key, Hash64(key), 3, &miss).ok());
    EXPECT_FALSE(miss.found);
  }
  // every block was loaded once, so the second pass is all cache hits
  TableGetResult r;
  ASSERT_TRUE(t->Get("k000010", Hash64("k000010"), 3, &r).ok());
  EXPECT_TRUE(r.data_from_cache);
}

TEST_F(TableFixture, IteratorsAgree) {
  auto t = Build(4, 2, 300, true);
  auto a = t->NewIterator(2);
  std::unique_ptr<RecordIterator> b;
  ASSERT_TRUE(t->NewSequentialIterator(2, false, &b).ok());
  a->SeekToFirst();
  b->SeekToFirst();
  int n = 0;
  for (; a->Valid(); a->Next(), b->Next(), ++n) {
    ASSERT_TRUE(b->Valid());
    EXPECT_EQ(a->key(), b->key());
    EXPECT_EQ(a->seqno(), b->seqno());
    EXPECT_EQ(a->value(), b->value());
  }
  EXPECT_FALSE(b->Valid());
  EXPECT_EQ(n, 300);
  a->Seek("k000101");
  ASSERT_TRUE(a->Valid());
  EXPECT_EQ(a->key(), "k000102");
  b->Seek("k000599");
  EXPECT_FALSE(b->Valid());
}

TEST_F(TableFixture, CorruptFileIsReported) {
  TableBuilder b(4096, 10);
  for (int i = 0; i < 100; ++i) b.Add("key" + std::to_string(1000 + i), 1, ValueKind::kPut, "v");
  TableProps props;
  std::string contents = b.Finish(&props);
  contents[10] ^= 0x1;
  ASSERT_TRUE(env->WriteFile(0, 0, 9, contents).ok());
  std::shared_ptr<TierFile> f;
  ASSERT_TRUE(env->OpenFile(0, 9, &f).ok());
  std::shared_ptr<Table> t;
  ASSERT_TRUE(Table::Open(env.get(), cache.get(), f, 0, {}, &t).ok());
  TableGetResult r;
  Status s = t->Get("key1000", Hash64("key1000"), 0, &r);
  EXPECT_TRUE(s.IsCorruption()) << s.ToString();
}

}  // namespace
}  // namespace prism
