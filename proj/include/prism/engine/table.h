#pragma once

// Sorted string table files.
//
//   [data block]* [filter block] [index block] [meta block] [footer]
//
// The index holds the first key of every data block with its handle. The
// footer is three fixed64 handle pairs and a magic number.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "prism/engine/block.h"
#include "prism/engine/block_cache.h"
#include "prism/engine/record.h"
#include "prism/status.h"
#include "prism/tiers.h"

namespace prism {

inline constexpr uint64_t kTableMagic = 0x707269736d737374ULL;
inline constexpr size_t kFooterSize = 7 * 8;

struct TableProps {
  uint64_t entries = 0;
  uint64_t tombstones = 0;
  uint64_t data_bytes = 0;
  uint64_t data_blocks = 0;
  SequenceNumber smallest_seq = kMaxSequenceNumber;
  SequenceNumber largest_seq = 0;
  std::string smallest_key;
  std::string largest_key;
};

class TableBuilder {
 public:
  TableBuilder(size_t block_size, int bloom_bits_per_key);

  // Keys must be strictly ascending.
  void Add(std::string_view key, SequenceNumber seq, ValueKind kind, std::string_view value);
  uint64_t entries() const { return props_.entries; }
  size_t EstimatedSize() const { return out_.size() + data_.CurrentSize(); }
  const std::string& last_key() const { return props_.largest_key; }

  // Returns the complete file contents.
  std::string Finish(TableProps* props);

 private:
  void FlushDataBlock();

  size_t block_size_;
  int bloom_bits_;
  std::string out_;
  BlockBuilder data_;
  BlockBuilder index_;
  std::string block_first_key_;
  std::vector<uint64_t> hashes_;
  TableProps props_;
};

struct TableGetResult {
  bool found = false;
  SequenceNumber seqno = 0;
  ValueKind kind = ValueKind::kPut;
  std::string value;
  bool filtered = false;
  bool data_from_cache = false;
};

class Table : public std::enable_shared_from_this<Table> {
 public:
  // contents may hold the complete file (just written); otherwise the
  // footer and meta block are read from the tier.
  static Status Open(TierEnv* env, BlockCache* cache, std::shared_ptr<TierFile> file, int level,
                     std::string_view contents, std::shared_ptr<Table>* out);

  // Point lookup of the newest version stored for key. key_hash is Hash64(key).
  Status Get(std::string_view key, uint64_t key_hash, int level, TableGetResult* out);

  // Block-by-block iteration through the block cache.
  std::unique_ptr<RecordIterator> NewIterator(int level);
  // Reads the whole file with one device request and iterates it in memory.
  Status NewSequentialIterator(int level, bool pay_latency, std::unique_ptr<RecordIterator>* out);

  const TableProps& props() const { return props_; }
  uint64_t file_id() const { return file_->id(); }
  uint64_t file_size() const { return file_->size(); }
  int tier() const { return file_->tier(); }
  const std::shared_ptr<TierFile>& file() const { return file_; }

  using BlockLoader =
      std::function<Status(const BlockHandle&, BlockKind, std::shared_ptr<const Block>*)>;

 private:
  Table() = default;
  Status ReadCached(const BlockHandle& h, BlockKind kind, int level,
                    std::shared_ptr<const Block>* out, bool* from_cache);

  TierEnv* env_ = nullptr;
  BlockCache* cache_ = nullptr;
  std::shared_ptr<TierFile> file_;
  BlockHandle filter_;
  BlockHandle index_;
  BlockHandle meta_;
  TableProps props_;
};

std::string EncodeTableProps(const TableProps& p);
Status DecodeTableProps(std::string_view in, TableProps* p);
Status DecodeFooter(std::string_view footer, BlockHandle* filter, BlockHandle* index,
                    BlockHandle* meta);

}  // namespace prism
