#include "prism/engine/block.h"

#include "prism/coding.h"
#include "prism/simd/kernels.h"

namespace prism {

const char* BlockKindName(BlockKind kind) {
  switch (kind) {
    case BlockKind::kData:
      return "data";
    case BlockKind::kIndex:
      return "index";
    case BlockKind::kFilter:
      return "filter";
  }
  return "?";
}

std::string SealBlock(std::string payload) {
  const uint32_t crc = simd::Crc32c(payload);
  PutFixed32(&payload, crc);
  return payload;
}

Status UnsealBlock(std::string_view raw, std::string_view* payload) {
  if (raw.size() < 4) return Status::Corruption("block too short");
  const std::string_view body = raw.substr(0, raw.size() - 4);
  if (simd::Crc32c(body) != DecodeFixed32(raw.data() + body.size())) {
    return Status::Corruption("block checksum mismatch");
  }
  *payload = body;
  return Status::OK();
}

namespace {
size_t VarintLength(uint64_t v) {
  size_t n = 1;
  while (v >= 0x80) {
    v >>= 7;
    ++n;
  }
  return n;
}
}  // namespace

void BlockBuilder::Add(std::string_view key, uint64_t tag, std::string_view value) {
  offsets_.push_back(static_cast<uint32_t>(buf_.size()));
  PutLengthPrefixed(&buf_, key);
  PutFixed64(&buf_, tag);
  PutLengthPrefixed(&buf_, value);
}

size_t BlockBuilder::CurrentSize() const { return buf_.size() + 4 * offsets_.size() + 8; }

size_t BlockBuilder::SizeWith(size_t key_len, size_t value_len) const {
  return CurrentSize() + VarintLength(key_len) + key_len + 8 + VarintLength(value_len) +
         value_len + 4;
}

std::string BlockBuilder::Finish() {
  std::string out = std::move(buf_);
  for (uint32_t off : offsets_) PutFixed32(&out, off);
  PutFixed32(&out, static_cast<uint32_t>(offsets_.size()));
  buf_.clear();
  offsets_.clear();
  return SealBlock(std::move(out));
}

Status Block::Parse(std::string raw, BlockKind kind, std::shared_ptr<const Block>* out) {
  std::shared_ptr<Block> b(new Block());
  b->kind_ = kind;
  b->raw_ = std::move(raw);
  Status s = UnsealBlock(b->raw_, &b->payload_);
  if (!s.ok()) return s;
  if (kind != BlockKind::kFilter) {
    const std::string_view p = b->payload_;
    if (p.size() < 4) return Status::Corruption("block payload too short");
    const uint32_t n = DecodeFixed32(p.data() + p.size() - 4);
    if (static_cast<uint64_t>(n) * 4 + 4 > p.size()) return Status::Corruption("bad entry count");
    const size_t table = p.size() - 4 - static_cast<size_t>(n) * 4;
    b->offsets_.resize(n);
    for (uint32_t i = 0; i < n; ++i) {
      const uint32_t off = DecodeFixed32(p.data() + table + 4 * i);
      if (off >= table) return Status::Corruption("entry offset out of range");
      b->offsets_[i] = off;
    }
    b->payload_ = p.substr(0, table);
  }
  *out = std::move(b);
  return Status::OK();
}

BlockEntry Block::Entry(uint32_t i) const {
  std::string_view in = payload_.substr(offsets_[i]);
  BlockEntry e{};
  GetLengthPrefixed(&in, &e.key);
  e.tag = in.size() >= 8 ? DecodeFixed64(in.data()) : 0;
  in.remove_prefix(in.size() >= 8 ? 8 : in.size());
  GetLengthPrefixed(&in, &e.value);
  return e;
}

uint32_t Block::LowerBound(std::string_view target) const {
  uint32_t lo = 0;
  uint32_t hi = num_entries();
  while (lo < hi) {
    const uint32_t mid = lo + (hi - lo) / 2;
    if (Entry(mid).key < target) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace prism
