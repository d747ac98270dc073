#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "prism/status.h"

namespace prism {

using SequenceNumber = uint64_t;
inline constexpr SequenceNumber kMaxSequenceNumber = (1ull << 56) - 1;

enum class ValueKind : uint8_t { kTombstone = 0, kPut = 1 };

inline uint64_t PackTag(SequenceNumber seq, ValueKind kind) {
  return (seq << 8) | static_cast<uint64_t>(kind);
}
inline SequenceNumber TagSequence(uint64_t tag) { return tag >> 8; }
inline ValueKind TagKind(uint64_t tag) { return static_cast<ValueKind>(tag & 0xff); }

struct Record {
  std::string key;
  std::string value;
  SequenceNumber seqno = 0;
  ValueKind kind = ValueKind::kPut;
};

// Orders (key ascending, seqno descending): the newest version of a key
// comes first.
inline int CompareVersions(std::string_view a_key, SequenceNumber a_seq, std::string_view b_key,
                           SequenceNumber b_seq) {
  const int c = a_key.compare(b_key);
  if (c != 0) return c < 0 ? -1 : 1;
  if (a_seq == b_seq) return 0;
  return a_seq > b_seq ? -1 : 1;
}

// Sorted stream of record versions.
class RecordIterator {
 public:
  virtual ~RecordIterator() = default;

  virtual bool Valid() const = 0;
  virtual void SeekToFirst() = 0;
  // Positions at the first entry whose key is >= target.
  virtual void Seek(std::string_view target) = 0;
  virtual void Next() = 0;

  virtual std::string_view key() const = 0;
  virtual SequenceNumber seqno() const = 0;
  virtual ValueKind kind() const = 0;
  virtual std::string_view value() const = 0;

  virtual Status status() const { return Status::OK(); }
};

}  // namespace prism
