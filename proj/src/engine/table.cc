#include "prism/engine/table.h"

#include "prism/coding.h"
#include "prism/engine/bloom.h"
#include "prism/hash.h"

namespace prism {

std::string EncodeTableProps(const TableProps& p) {
  std::string out;
  PutFixed64(&out, p.entries);
  PutFixed64(&out, p.tombstones);
  PutFixed64(&out, p.data_bytes);
  PutFixed64(&out, p.data_blocks);
  PutFixed64(&out, p.smallest_seq);
  PutFixed64(&out, p.largest_seq);
  PutLengthPrefixed(&out, p.smallest_key);
  PutLengthPrefixed(&out, p.largest_key);
  return out;
}

Status DecodeTableProps(std::string_view in, TableProps* p) {
  if (in.size() < 48) return Status::Corruption("meta block too short");
  p->entries = DecodeFixed64(in.data());
  p->tombstones = DecodeFixed64(in.data() + 8);
  p->data_bytes = DecodeFixed64(in.data() + 16);
  p->data_blocks = DecodeFixed64(in.data() + 24);
  p->smallest_seq = DecodeFixed64(in.data() + 32);
  p->largest_seq = DecodeFixed64(in.data() + 40);
  in.remove_prefix(48);
  std::string_view lo, hi;
  if (!GetLengthPrefixed(&in, &lo) || !GetLengthPrefixed(&in, &hi)) {
    return Status::Corruption("meta block key range");
  }
  p->smallest_key.assign(lo);
  p->largest_key.assign(hi);
  return Status::OK();
}

Status DecodeFooter(std::string_view footer, BlockHandle* filter, BlockHandle* index,
                    BlockHandle* meta) {
  if (footer.size() != kFooterSize) return Status::Corruption("bad footer size");
  if (DecodeFixed64(footer.data() + 48) != kTableMagic) return Status::Corruption("bad magic");
  filter->offset = DecodeFixed64(footer.data());
  filter->size = DecodeFixed64(footer.data() + 8);
  index->offset = DecodeFixed64(footer.data() + 16);
  index->size = DecodeFixed64(footer.data() + 24);
  meta->offset = DecodeFixed64(footer.data() + 32);
  meta->size = DecodeFixed64(footer.data() + 40);
  return Status::OK();
}

TableBuilder::TableBuilder(size_t block_size, int bloom_bits_per_key)
    : block_size_(block_size), bloom_bits_(bloom_bits_per_key) {}

void TableBuilder::Add(std::string_view key, SequenceNumber seq, ValueKind kind,
                       std::string_view value) {
  if (!data_.empty() && data_.SizeWith(key.size(), value.size()) > block_size_) FlushDataBlock();
  if (data_.empty()) block_first_key_.assign(key);
  data_.Add(key, PackTag(seq, kind), value);
  hashes_.push_back(Hash64(key));
  if (props_.entries == 0) props_.smallest_key.assign(key);
  props_.largest_key.assign(key);
  ++props_.entries;
  if (kind == ValueKind::kTombstone) ++props_.tombstones;
  if (seq < props_.smallest_seq) props_.smallest_seq = seq;
  if (seq > props_.largest_seq) props_.largest_seq = seq;
}

void TableBuilder::FlushDataBlock() {
  if (data_.empty()) return;
  const std::string block = data_.Finish();
  std::string handle;
  PutFixed64(&handle, out_.size());
  PutFixed64(&handle, block.size());
  index_.Add(block_first_key_, 0, handle);
  out_.append(block);
  ++props_.data_blocks;
}

std::string TableBuilder::Finish(TableProps* props) {
  FlushDataBlock();
  props_.data_bytes = out_.size();

  const uint64_t filter_off = out_.size();
  out_.append(SealBlock(BuildBloomFilter(hashes_, bloom_bits_)));
  const uint64_t index_off = out_.size();
  out_.append(index_.Finish());
  const uint64_t meta_off = out_.size();
  out_.append(SealBlock(EncodeTableProps(props_)));
  const uint64_t end = out_.size();

  PutFixed64(&out_, filter_off);
  PutFixed64(&out_, index_off - filter_off);
  PutFixed64(&out_, index_off);
  PutFixed64(&out_, meta_off - index_off);
  PutFixed64(&out_, meta_off);
  PutFixed64(&out_, end - meta_off);
  PutFixed64(&out_, kTableMagic);
  if (props != nullptr) *props = props_;
  return std::move(out_);
}

Status Table::Open(TierEnv* env, BlockCache* cache, std::shared_ptr<TierFile> file, int level,
                   std::string_view contents, std::shared_ptr<Table>* out) {
  std::shared_ptr<Table> t(new Table());
  t->env_ = env;
  t->cache_ = cache;
  t->file_ = std::move(file);
  const uint64_t size = t->file_->size();
  if (size < kFooterSize) return Status::Corruption("file too short for footer");

  std::string footer_buf;
  std::string_view footer;
  if (!contents.empty()) {
    footer = contents.substr(contents.size() - kFooterSize);
  } else {
    Status s = env->ReadBlock(*t->file_, level, size - kFooterSize, kFooterSize, &footer_buf);
    if (!s.ok()) return s;
    footer = footer_buf;
  }
  Status s = DecodeFooter(footer, &t->filter_, &t->index_, &t->meta_);
  if (!s.ok()) return s;
  if (t->meta_.offset + t->meta_.size > size) return Status::Corruption("meta handle past end");

  std::string meta_buf;
  std::string_view meta_raw;
  if (!contents.empty()) {
    meta_raw = contents.substr(t->meta_.offset, t->meta_.size);
  } else {
    s = env->ReadBlock(*t->file_, level, t->meta_.offset, t->meta_.size, &meta_buf);
    if (!s.ok()) return s;
    meta_raw = meta_buf;
  }
  std::string_view payload;
  s = UnsealBlock(meta_raw, &payload);
  if (!s.ok()) return s;
  s = DecodeTableProps(payload, &t->props_);
  if (!s.ok()) return s;
  *out = std::move(t);
  return Status::OK();
}

Status Table::ReadCached(const BlockHandle& h, BlockKind kind, int level,
                         std::shared_ptr<const Block>* out, bool* from_cache) {
  if (cache_ != nullptr) {
    *out = cache_->Lookup(file_->id(), h.offset, kind);
    if (*out) {
      if (from_cache != nullptr) *from_cache = true;
      return Status::OK();
    }
  }
  if (from_cache != nullptr) *from_cache = false;
  std::string raw;
  Status s = env_->ReadBlock(*file_, level, h.offset, h.size, &raw);
  if (!s.ok()) return s;
  s = Block::Parse(std::move(raw), kind, out);
  if (!s.ok()) return s;
  if (cache_ != nullptr) cache_->Insert(file_->id(), h.offset, *out);
  return Status::OK();
}

namespace {

bool DecodeHandle(std::string_view v, BlockHandle* h) {
  if (v.size() != 16) return false;
  h->offset = DecodeFixed64(v.data());
  h->size = DecodeFixed64(v.data() + 8);
  return true;
}

// Last block whose first key is <= target, or 0.
uint32_t IndexSlot(const Block& index, std::string_view target) {
  const uint32_t lb = index.LowerBound(target);
  if (lb < index.num_entries() && index.Entry(lb).key == target) return lb;
  return lb == 0 ? 0 : lb - 1;
}

class TwoLevelIterator final : public RecordIterator {
 public:
  TwoLevelIterator(std::shared_ptr<const Block> index, Table::BlockLoader loader,
                   std::shared_ptr<const void> owner)
      : index_(std::move(index)), loader_(std::move(loader)), owner_(std::move(owner)) {}

  bool Valid() const override { return data_ != nullptr && data_->Valid(); }
  void SeekToFirst() override {
    LoadBlock(0);
    if (data_) data_->SeekToFirst();
    SkipEmpty();
  }
  void Seek(std::string_view target) override {
    LoadBlock(IndexSlot(*index_, target));
    if (data_) data_->Seek(target);
    SkipEmpty();
  }
  void Next() override {
    data_->Next();
    SkipEmpty();
  }
  std::string_view key() const override { return data_->key(); }
  SequenceNumber seqno() const override { return data_->seqno(); }
  ValueKind kind() const override { return data_->kind(); }
  std::string_view value() const override { return data_->value(); }
  Status status() const override { return status_; }

 private:
  void LoadBlock(uint32_t i) {
    block_ = i;
    data_.reset();
    if (i >= index_->num_entries() || !status_.ok()) return;
    BlockHandle h;
    if (!DecodeHandle(index_->Entry(i).value, &h)) {
      status_ = Status::Corruption("bad block handle");
      return;
    }
    std::shared_ptr<const Block> b;
    Status s = loader_(h, BlockKind::kData, &b);
    if (!s.ok()) {
      status_ = s;
      return;
    }
    data_ = std::make_unique<BlockIterator>(std::move(b));
  }
  void SkipEmpty() {
    while (data_ != nullptr && !data_->Valid()) {
      LoadBlock(block_ + 1);
      if (data_) data_->SeekToFirst();
    }
  }

  std::shared_ptr<const Block> index_;
  Table::BlockLoader loader_;
  std::shared_ptr<const void> owner_;
  uint32_t block_ = 0;
  std::unique_ptr<BlockIterator> data_;
  Status status_;
};

class ErrorIterator final : public RecordIterator {
 public:
  explicit ErrorIterator(Status s) : s_(std::move(s)) {}
  bool Valid() const override { return false; }
  void SeekToFirst() override {}
  void Seek(std::string_view) override {}
  void Next() override {}
  std::string_view key() const override { return {}; }
  SequenceNumber seqno() const override { return 0; }
  ValueKind kind() const override { return ValueKind::kPut; }
  std::string_view value() const override { return {}; }
  Status status() const override { return s_; }

 private:
  Status s_;
};

}  // namespace

Status Table::Get(std::string_view key, uint64_t key_hash, int level, TableGetResult* out) {
  *out = TableGetResult{};
  if (filter_.size > 4) {
    std::shared_ptr<const Block> filter;
    Status s = ReadCached(filter_, BlockKind::kFilter, level, &filter, nullptr);
    if (!s.ok()) return s;
    if (!BloomMayContain(filter->payload(), key_hash)) {
      out->filtered = true;
      return Status::OK();
    }
  }
  std::shared_ptr<const Block> index;
  Status s = ReadCached(index_, BlockKind::kIndex, level, &index, nullptr);
  if (!s.ok()) return s;
  if (index->num_entries() == 0) return Status::OK();
  BlockHandle h;
  if (!DecodeHandle(index->Entry(IndexSlot(*index, key)).value, &h)) {
    return Status::Corruption("bad block handle");
  }
  std::shared_ptr<const Block> data;
  s = ReadCached(h, BlockKind::kData, level, &data, &out->data_from_cache);
  if (!s.ok()) return s;
  const uint32_t i = data->LowerBound(key);
  if (i < data->num_entries()) {
    const BlockEntry e = data->Entry(i);
    if (e.key == key) {
      out->found = true;
      out->seqno = TagSequence(e.tag);
      out->kind = TagKind(e.tag);
      out->value.assign(e.value);
    }
  }
  return Status::OK();
}

std::unique_ptr<RecordIterator> Table::NewIterator(int level) {
  std::shared_ptr<const Block> index;
  Status s = ReadCached(index_, BlockKind::kIndex, level, &index, nullptr);
  if (!s.ok()) return std::make_unique<ErrorIterator>(s);
  auto self = shared_from_this();
  Table* raw = this;
  auto loader = [raw, level](const BlockHandle& h, BlockKind kind,
                             std::shared_ptr<const Block>* out) {
    return raw->ReadCached(h, kind, level, out, nullptr);
  };
  return std::make_unique<TwoLevelIterator>(std::move(index), std::move(loader), self);
}

Status Table::NewSequentialIterator(int level, bool pay_latency,
                                    std::unique_ptr<RecordIterator>* out) {
  auto contents = std::make_shared<std::string>();
  Status s = env_->ReadBlock(*file_, level, 0, file_->size(), contents.get(), pay_latency);
  if (!s.ok()) return s;
  if (index_.offset + index_.size > contents->size()) return Status::Corruption("index past end");
  std::shared_ptr<const Block> index;
  s = Block::Parse(contents->substr(index_.offset, index_.size), BlockKind::kIndex, &index);
  if (!s.ok()) return s;
  const std::string* data = contents.get();
  auto loader = [data](const BlockHandle& h, BlockKind kind, std::shared_ptr<const Block>* b) {
    if (h.offset + h.size > data->size()) return Status::Corruption("block past end");
    return Block::Parse(data->substr(h.offset, h.size), kind, b);
  };
  *out = std::make_unique<TwoLevelIterator>(std::move(index), std::move(loader), contents);
  return Status::OK();
}

}  // namespace prism
