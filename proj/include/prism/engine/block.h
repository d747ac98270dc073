#pragma once

// SST block encoding.
//
//   entry   := varint klen | key | fixed64 (seq << 8 | kind) | varint vlen | value
//   payload := entry* | fixed32 offset[n] | fixed32 n
//   block   := payload | fixed32 crc32c(payload)
//
// Filter and meta blocks carry an opaque payload with the same trailer.

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "prism/engine/record.h"
#include "prism/status.h"

namespace prism {

enum class BlockKind : uint8_t { kData = 0, kIndex = 1, kFilter = 2 };
inline constexpr int kNumBlockKinds = 3;
const char* BlockKindName(BlockKind kind);

struct BlockHandle {
  uint64_t offset = 0;
  uint64_t size = 0;  // including the checksum trailer
};

std::string SealBlock(std::string payload);
// Verifies the trailer and returns the payload.
Status UnsealBlock(std::string_view raw, std::string_view* payload);

class BlockBuilder {
 public:
  void Add(std::string_view key, uint64_t tag, std::string_view value);
  // Encoded block size if an entry with these lengths were added.
  size_t SizeWith(size_t key_len, size_t value_len) const;
  size_t CurrentSize() const;
  bool empty() const { return offsets_.empty(); }
  uint32_t count() const { return static_cast<uint32_t>(offsets_.size()); }
  // Returns the sealed block and resets the builder.
  std::string Finish();

 private:
  std::string buf_;
  std::vector<uint32_t> offsets_;
};

struct BlockEntry {
  std::string_view key;
  uint64_t tag;
  std::string_view value;
};

class Block {
 public:
  static Status Parse(std::string raw, BlockKind kind, std::shared_ptr<const Block>* out);

  BlockKind kind() const { return kind_; }
  size_t charge() const { return raw_.size(); }
  uint32_t num_entries() const { return static_cast<uint32_t>(offsets_.size()); }
  BlockEntry Entry(uint32_t i) const;
  // First entry whose key is >= target (num_entries() if none).
  uint32_t LowerBound(std::string_view target) const;
  std::string_view payload() const { return payload_; }

 private:
  Block() = default;

  BlockKind kind_ = BlockKind::kData;
  std::string raw_;
  std::string_view payload_;
  std::vector<uint32_t> offsets_;
};

class BlockIterator final : public RecordIterator {
 public:
  explicit BlockIterator(std::shared_ptr<const Block> block) : block_(std::move(block)) {}

  bool Valid() const override { return i_ < block_->num_entries(); }
  void SeekToFirst() override { Load(0); }
  void Seek(std::string_view target) override { Load(block_->LowerBound(target)); }
  void Next() override { Load(i_ + 1); }
  std::string_view key() const override { return cur_.key; }
  SequenceNumber seqno() const override { return TagSequence(cur_.tag); }
  ValueKind kind() const override { return TagKind(cur_.tag); }
  std::string_view value() const override { return cur_.value; }

 private:
  void Load(uint32_t i) {
    i_ = i;
    if (Valid()) cur_ = block_->Entry(i_);
  }

  std::shared_ptr<const Block> block_;
  uint32_t i_ = UINT32_MAX;
  BlockEntry cur_{};
};

}  // namespace prism
