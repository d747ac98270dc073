#pragma once

// In-memory write buffer: a skiplist over arena-allocated entries.
// One writer at a time (callers serialize Add); readers need no locks.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include "prism/engine/record.h"

namespace prism {

class Arena {
 public:
  Arena() = default;
  Arena(const Arena&) = delete;
  Arena& operator=(const Arena&) = delete;

  char* Allocate(size_t bytes);
  char* AllocateAligned(size_t bytes);
  // Bytes handed out, not reserved, so small write buffers flush on time.
  size_t MemoryUsage() const { return usage_.load(std::memory_order_relaxed); }

 private:
  char* AllocateFallback(size_t bytes);
  char* NewBlock(size_t bytes);

  char* ptr_ = nullptr;
  size_t remaining_ = 0;
  std::vector<std::unique_ptr<char[]>> blocks_;
  std::atomic<size_t> usage_{0};
};

struct MemTableHit {
  SequenceNumber seqno;
  ValueKind kind;
  std::string_view value;  // valid while the memtable is alive
};

class MemTable {
 public:
  static constexpr int kMaxHeight = 12;

  MemTable();
  MemTable(const MemTable&) = delete;
  MemTable& operator=(const MemTable&) = delete;

  void Add(SequenceNumber seq, ValueKind kind, std::string_view key, std::string_view value);
  // Newest version of key, if any.
  std::optional<MemTableHit> Get(std::string_view key) const;

  size_t ApproximateBytes() const { return arena_.MemoryUsage(); }
  uint64_t entries() const { return entries_.load(std::memory_order_relaxed); }
  bool empty() const { return entries() == 0; }
  SequenceNumber largest_seq() const { return largest_seq_.load(std::memory_order_relaxed); }

  std::unique_ptr<RecordIterator> NewIterator() const;

 private:
  struct Node;
  class Iter;

  static std::string_view EntryKey(const char* entry);
  static uint64_t EntryTag(const char* entry);
  static std::string_view EntryValue(const char* entry);

  // <0 when the node's entry orders before (key, seq).
  static int CompareNode(const Node* n, std::string_view key, SequenceNumber seq);

  Node* NewNode(const char* entry, int height);
  int RandomHeight();
  Node* FindGreaterOrEqual(std::string_view key, SequenceNumber seq, Node** prev) const;
  int height() const { return max_height_.load(std::memory_order_relaxed); }

  Arena arena_;
  Node* head_;
  std::atomic<int> max_height_{1};
  uint64_t rnd_ = 0x2545f4914f6cdd1dULL;
  std::atomic<uint64_t> entries_{0};
  std::atomic<SequenceNumber> largest_seq_{0};
};

}  // namespace prism
