#include "prism/engine/memtable.h"

#include <cstring>

#include "prism/coding.h"

namespace prism {

namespace {
constexpr size_t kArenaBlockSize = 64 * 1024;
}

char* Arena::Allocate(size_t bytes) {
  usage_.fetch_add(bytes, std::memory_order_relaxed);
  if (bytes <= remaining_) {
    char* result = ptr_;
    ptr_ += bytes;
    remaining_ -= bytes;
    return result;
  }
  return AllocateFallback(bytes);
}

char* Arena::AllocateAligned(size_t bytes) {
  constexpr size_t kAlign = alignof(std::max_align_t) > 8 ? alignof(std::max_align_t) : 8;
  const size_t mod = reinterpret_cast<uintptr_t>(ptr_) & (kAlign - 1);
  const size_t slop = mod == 0 ? 0 : kAlign - mod;
  usage_.fetch_add(bytes + slop, std::memory_order_relaxed);
  if (bytes + slop <= remaining_) {
    char* result = ptr_ + slop;
    ptr_ += bytes + slop;
    remaining_ -= bytes + slop;
    return result;
  }
  return AllocateFallback(bytes);
}

char* Arena::AllocateFallback(size_t bytes) {
  if (bytes > kArenaBlockSize / 4) return NewBlock(bytes);
  ptr_ = NewBlock(kArenaBlockSize);
  remaining_ = kArenaBlockSize;
  char* result = ptr_;
  ptr_ += bytes;
  remaining_ -= bytes;
  return result;
}

char* Arena::NewBlock(size_t bytes) {
  blocks_.push_back(std::make_unique<char[]>(bytes));
  return blocks_.back().get();
}

struct MemTable::Node {
  const char* entry;
  std::atomic<Node*> next_[1];

  Node* Next(int n) const { return next_[n].load(std::memory_order_acquire); }
  void SetNext(int n, Node* x) { next_[n].store(x, std::memory_order_release); }
  Node* NoBarrierNext(int n) const { return next_[n].load(std::memory_order_relaxed); }
  void NoBarrierSetNext(int n, Node* x) { next_[n].store(x, std::memory_order_relaxed); }
};

MemTable::MemTable() : head_(NewNode(nullptr, kMaxHeight)) {
  for (int i = 0; i < kMaxHeight; ++i) head_->SetNext(i, nullptr);
}

MemTable::Node* MemTable::NewNode(const char* entry, int height) {
  char* mem = arena_.AllocateAligned(sizeof(Node) + sizeof(std::atomic<Node*>) * (height - 1));
  Node* n = new (mem) Node;
  n->entry = entry;
  for (int i = 1; i < height; ++i) new (&n->next_[i]) std::atomic<Node*>(nullptr);
  return n;
}

int MemTable::RandomHeight() {
  int h = 1;
  while (h < kMaxHeight) {
    rnd_ ^= rnd_ << 13;
    rnd_ ^= rnd_ >> 7;
    rnd_ ^= rnd_ << 17;
    if ((rnd_ & 3) != 0) break;
    ++h;
  }
  return h;
}

std::string_view MemTable::EntryKey(const char* entry) {
  std::string_view in(entry, 5);
  uint32_t klen = 0;
  GetVarint32(&in, &klen);
  return {in.data(), klen};
}

uint64_t MemTable::EntryTag(const char* entry) {
  const std::string_view k = EntryKey(entry);
  return DecodeFixed64(k.data() + k.size());
}

std::string_view MemTable::EntryValue(const char* entry) {
  const std::string_view k = EntryKey(entry);
  std::string_view in(k.data() + k.size() + 8, 5);
  uint32_t vlen = 0;
  GetVarint32(&in, &vlen);
  return {in.data(), vlen};
}

int MemTable::CompareNode(const Node* n, std::string_view key, SequenceNumber seq) {
  return CompareVersions(EntryKey(n->entry), TagSequence(EntryTag(n->entry)), key, seq);
}

MemTable::Node* MemTable::FindGreaterOrEqual(std::string_view key, SequenceNumber seq,
                                             Node** prev) const {
  Node* x = head_;
  int level = height() - 1;
  while (true) {
    Node* next = x->Next(level);
    if (next != nullptr && CompareNode(next, key, seq) < 0) {
      x = next;
    } else {
      if (prev != nullptr) prev[level] = x;
      if (level == 0) return next;
      --level;
    }
  }
}

void MemTable::Add(SequenceNumber seq, ValueKind kind, std::string_view key,
                   std::string_view value) {
  std::string header;
  PutVarint32(&header, static_cast<uint32_t>(key.size()));
  const size_t klen_bytes = header.size();
  std::string vheader;
  PutVarint32(&vheader, static_cast<uint32_t>(value.size()));
  const size_t total = klen_bytes + key.size() + 8 + vheader.size() + value.size();
  char* buf = arena_.Allocate(total);
  char* p = buf;
  std::memcpy(p, header.data(), klen_bytes);
  p += klen_bytes;
  std::memcpy(p, key.data(), key.size());
  p += key.size();
  const uint64_t tag = PackTag(seq, kind);
  std::memcpy(p, &tag, 8);
  p += 8;
  std::memcpy(p, vheader.data(), vheader.size());
  p += vheader.size();
  std::memcpy(p, value.data(), value.size());

  Node* prev[kMaxHeight];
  FindGreaterOrEqual(key, seq, prev);
  const int h = RandomHeight();
  if (h > height()) {
    for (int i = height(); i < h; ++i) prev[i] = head_;
    max_height_.store(h, std::memory_order_relaxed);
  }
  Node* x = NewNode(buf, h);
  for (int i = 0; i < h; ++i) {
    x->NoBarrierSetNext(i, prev[i]->NoBarrierNext(i));
    prev[i]->SetNext(i, x);
  }
  entries_.fetch_add(1, std::memory_order_relaxed);
  if (seq > largest_seq_.load(std::memory_order_relaxed)) {
    largest_seq_.store(seq, std::memory_order_relaxed);
  }
}

std::optional<MemTableHit> MemTable::Get(std::string_view key) const {
  Node* n = FindGreaterOrEqual(key, kMaxSequenceNumber, nullptr);
  if (n == nullptr || EntryKey(n->entry) != key) return std::nullopt;
  const uint64_t tag = EntryTag(n->entry);
  return MemTableHit{TagSequence(tag), TagKind(tag), EntryValue(n->entry)};
}

class MemTable::Iter final : public RecordIterator {
 public:
  explicit Iter(const MemTable* mem) : mem_(mem) {}

  bool Valid() const override { return node_ != nullptr; }
  void SeekToFirst() override { node_ = mem_->head_->Next(0); }
  void Seek(std::string_view target) override {
    node_ = mem_->FindGreaterOrEqual(target, kMaxSequenceNumber, nullptr);
  }
  void Next() override { node_ = node_->Next(0); }
  std::string_view key() const override { return EntryKey(node_->entry); }
  SequenceNumber seqno() const override { return TagSequence(EntryTag(node_->entry)); }
  ValueKind kind() const override { return TagKind(EntryTag(node_->entry)); }
  std::string_view value() const override { return EntryValue(node_->entry); }

 private:
  const MemTable* mem_;
  Node* node_ = nullptr;
};

std::unique_ptr<RecordIterator> MemTable::NewIterator() const {
  return std::make_unique<Iter>(this);
}

}  // namespace prism
