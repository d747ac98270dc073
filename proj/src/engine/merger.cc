#include "prism/engine/merger.h"

#include <algorithm>

#include "prism/engine/table.h"

namespace prism {

MergingIterator::MergingIterator(std::vector<std::unique_ptr<RecordIterator>> children)
    : children_(std::move(children)) {}

void MergingIterator::FindSmallest() {
  current_ = -1;
  for (size_t i = 0; i < children_.size(); ++i) {
    const auto& c = children_[i];
    if (!c->Valid()) continue;
    if (current_ < 0 ||
        CompareVersions(c->key(), c->seqno(), cur().key(), cur().seqno()) < 0) {
      current_ = static_cast<int>(i);
    }
  }
}

void MergingIterator::SeekToFirst() {
  for (auto& c : children_) c->SeekToFirst();
  FindSmallest();
}

void MergingIterator::Seek(std::string_view target) {
  for (auto& c : children_) c->Seek(target);
  FindSmallest();
}

void MergingIterator::Next() {
  children_[static_cast<size_t>(current_)]->Next();
  FindSmallest();
}

Status MergingIterator::status() const {
  for (const auto& c : children_) {
    Status s = c->status();
    if (!s.ok()) return s;
  }
  return Status::OK();
}

LevelIterator::LevelIterator(std::vector<FilePtr> files, int level)
    : files_(std::move(files)), level_(level) {}

void LevelIterator::Open(size_t i) {
  index_ = i;
  it_.reset();
  if (i >= files_.size() || !status_.ok()) return;
  it_ = files_[i]->table->NewIterator(level_);
  if (!it_->status().ok()) {
    status_ = it_->status();
    it_.reset();
  }
}

void LevelIterator::SkipEmpty() {
  while (it_ != nullptr && !it_->Valid()) {
    if (!it_->status().ok()) {
      status_ = it_->status();
      it_.reset();
      return;
    }
    Open(index_ + 1);
    if (it_) it_->SeekToFirst();
  }
}

void LevelIterator::SeekToFirst() {
  Open(0);
  if (it_) it_->SeekToFirst();
  SkipEmpty();
}

void LevelIterator::Seek(std::string_view target) {
  auto pos = std::lower_bound(files_.begin(), files_.end(), target,
                              [](const FilePtr& f, std::string_view k) { return f->largest < k; });
  Open(static_cast<size_t>(pos - files_.begin()));
  if (it_) it_->Seek(target);
  SkipEmpty();
}

void LevelIterator::Next() {
  it_->Next();
  SkipEmpty();
}

}  // namespace prism
