#pragma once

#include <memory>
#include <vector>

#include "prism/engine/record.h"
#include "prism/engine/version.h"

namespace prism {

// K-way merge ordered by (key asc, seqno desc). Duplicate versions are all
// yielded; callers decide which survive.
class MergingIterator final : public RecordIterator {
 public:
  explicit MergingIterator(std::vector<std::unique_ptr<RecordIterator>> children);

  bool Valid() const override { return current_ >= 0; }
  void SeekToFirst() override;
  void Seek(std::string_view target) override;
  void Next() override;
  std::string_view key() const override { return cur().key(); }
  SequenceNumber seqno() const override { return cur().seqno(); }
  ValueKind kind() const override { return cur().kind(); }
  std::string_view value() const override { return cur().value(); }
  Status status() const override;

  // Index of the child the current entry comes from.
  int current_child() const { return current_; }

 private:
  const RecordIterator& cur() const { return *children_[static_cast<size_t>(current_)]; }
  void FindSmallest();

  std::vector<std::unique_ptr<RecordIterator>> children_;
  int current_ = -1;
};

// Concatenation of the files of a sorted level (L1+), opening tables lazily.
class LevelIterator final : public RecordIterator {
 public:
  LevelIterator(std::vector<FilePtr> files, int level);

  bool Valid() const override { return it_ != nullptr && it_->Valid(); }
  void SeekToFirst() override;
  void Seek(std::string_view target) override;
  void Next() override;
  std::string_view key() const override { return it_->key(); }
  SequenceNumber seqno() const override { return it_->seqno(); }
  ValueKind kind() const override { return it_->kind(); }
  std::string_view value() const override { return it_->value(); }
  Status status() const override { return status_; }

 private:
  void Open(size_t i);
  void SkipEmpty();

  std::vector<FilePtr> files_;
  int level_;
  size_t index_ = 0;
  std::unique_ptr<RecordIterator> it_;
  Status status_;
};

}  // namespace prism
