#include "prism/engine/version.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

namespace prism {

uint64_t Version::LevelBytes(int level) const {
  uint64_t total = 0;
  for (const auto& f : files(level)) total += f->size;
  return total;
}

uint64_t Version::TotalBytes() const {
  uint64_t total = 0;
  for (int l = 0; l < num_levels; ++l) total += LevelBytes(l);
  return total;
}

size_t Version::NumFiles() const {
  size_t n = 0;
  for (const auto& l : levels) n += l.size();
  return n;
}

int Version::L0TriggerFiles() const {
  int n = 0;
  for (const auto& f : files(0)) {
    if (!f->retained) ++n;
  }
  return n;
}

std::vector<FilePtr> Version::Overlapping(int level, std::string_view lo,
                                          std::string_view hi) const {
  std::vector<FilePtr> out;
  for (const auto& f : files(level)) {
    if (f->Overlaps(lo, hi)) out.push_back(f);
  }
  return out;
}

const FilePtr* Version::FindFile(int level, std::string_view key) const {
  const auto& fs = files(level);
  auto it = std::lower_bound(fs.begin(), fs.end(), key,
                             [](const FilePtr& f, std::string_view k) { return f->largest < k; });
  return it == fs.end() ? nullptr : &*it;
}

Status Version::CheckInvariants() const {
  for (int l = 1; l < num_levels; ++l) {
    const auto& fs = files(l);
    for (size_t i = 0; i < fs.size(); ++i) {
      if (fs[i]->smallest > fs[i]->largest) {
        return Status::Corruption("L" + std::to_string(l) + " file with inverted range");
      }
      if (i > 0 && !(fs[i - 1]->largest < fs[i]->smallest)) {
        return Status::Corruption("L" + std::to_string(l) + " files " +
                                  std::to_string(fs[i - 1]->id) + " and " +
                                  std::to_string(fs[i]->id) + " overlap");
      }
    }
  }
  return Status::OK();
}

void SortLevel(int level, std::vector<FilePtr>* files) {
  if (level == 0) {
    std::sort(files->begin(), files->end(), [](const FilePtr& a, const FilePtr& b) {
      if (a->largest_seq != b->largest_seq) return a->largest_seq > b->largest_seq;
      return a->id > b->id;
    });
  } else {
    std::sort(files->begin(), files->end(),
              [](const FilePtr& a, const FilePtr& b) { return a->smallest < b->smallest; });
  }
}

std::shared_ptr<const Version> ApplyEdit(const Version& base, const VersionEdit& edit) {
  auto v = std::make_shared<Version>(base.num_levels);
  std::unordered_set<uint64_t> gone;
  for (const auto& d : edit.deleted) gone.insert(d.id);
  for (int l = 0; l < base.num_levels; ++l) {
    for (const auto& f : base.files(l)) {
      if (gone.count(f->id) == 0) v->levels[static_cast<size_t>(l)].push_back(f);
    }
  }
  for (const auto& f : edit.added) v->levels[static_cast<size_t>(f->level)].push_back(f);
  for (int l = 0; l < v->num_levels; ++l) SortLevel(l, &v->levels[static_cast<size_t>(l)]);
  return v;
}

std::string HexEncode(std::string_view s) {
  static const char* kDigits = "0123456789abcdef";
  std::string out;
  out.reserve(s.size() * 2 + 1);
  out.push_back('x');  // keeps empty keys a non-empty token
  for (unsigned char c : s) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 15]);
  }
  return out;
}

bool HexDecode(std::string_view hex, std::string* out) {
  if (hex.empty() || hex[0] != 'x' || (hex.size() - 1) % 2 != 0) return false;
  out->clear();
  auto val = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  for (size_t i = 1; i < hex.size(); i += 2) {
    const int hi = val(hex[i]);
    const int lo = val(hex[i + 1]);
    if (hi < 0 || lo < 0) return false;
    out->push_back(static_cast<char>(hi * 16 + lo));
  }
  return true;
}

namespace {

std::string EncodeEdit(const VersionEdit& edit) {
  std::ostringstream os;
  os << "edit\n";
  for (const auto& d : edit.deleted) os << "del " << d.level << ' ' << d.id << '\n';
  for (const auto& f : edit.added) {
    os << "add " << f->level << ' ' << f->tier << ' ' << f->id << ' ' << f->size << ' '
       << f->entries << ' ' << f->tombstones << ' ' << f->smallest_seq << ' ' << f->largest_seq
       << ' ' << f->score << ' ' << (f->retained ? 1 : 0) << ' ' << HexEncode(f->smallest) << ' '
       << HexEncode(f->largest) << '\n';
  }
  os << "next_file " << edit.next_file_id << '\n';
  os << "last_seq " << edit.last_seq << '\n';
  os << "commit\n";
  return os.str();
}

}  // namespace

Manifest::~Manifest() {
  if (f_ != nullptr) std::fclose(f_);
}

Status Manifest::Replay(const std::string& path, ManifestState* state) {
  std::ifstream in(path);
  if (!in) return Status::IOError("cannot open manifest " + path);
  std::map<uint64_t, FileMeta> live;
  std::vector<std::string> group;
  std::string line;
  auto apply = [&](const std::vector<std::string>& lines) -> Status {
    for (const auto& l : lines) {
      std::istringstream ls(l);
      std::string op;
      ls >> op;
      if (op == "del") {
        int level;
        uint64_t id;
        ls >> level >> id;
        live.erase(id);
      } else if (op == "add") {
        FileMeta f;
        int retained = 0;
        std::string lo, hi;
        ls >> f.level >> f.tier >> f.id >> f.size >> f.entries >> f.tombstones >> f.smallest_seq >>
            f.largest_seq >> f.score >> retained >> lo >> hi;
        if (!ls || !HexDecode(lo, &f.smallest) || !HexDecode(hi, &f.largest)) {
          return Status::Corruption("manifest add line: " + l);
        }
        f.retained = retained != 0;
        live[f.id] = std::move(f);
      } else if (op == "next_file") {
        ls >> state->next_file_id;
      } else if (op == "last_seq") {
        ls >> state->last_seq;
      } else if (op != "edit") {
        return Status::Corruption("manifest line: " + l);
      }
    }
    return Status::OK();
  };
  while (std::getline(in, line)) {
    if (line == "commit") {
      Status s = apply(group);
      if (!s.ok()) return s;
      group.clear();
    } else if (!line.empty()) {
      group.push_back(line);
    }
  }
  state->files.clear();
  for (auto& [id, f] : live) state->files.push_back(std::move(f));
  return Status::OK();
}

Status Manifest::OpenForAppend(const std::string& path) {
  if (f_ != nullptr) std::fclose(f_);
  f_ = std::fopen(path.c_str(), "a");
  if (f_ == nullptr) return Status::IOError("cannot open manifest " + path);
  return Status::OK();
}

Status Manifest::Append(const VersionEdit& edit) {
  if (f_ == nullptr) return Status::IOError("manifest not open");
  const std::string rec = EncodeEdit(edit);
  if (std::fwrite(rec.data(), 1, rec.size(), f_) != rec.size() || std::fflush(f_) != 0) {
    return Status::IOError("manifest write failed");
  }
  return Status::OK();
}

Status Manifest::WriteSnapshot(const std::string& path, const Version& v, uint64_t next_file_id,
                               SequenceNumber last_seq) {
  VersionEdit edit;
  for (int l = 0; l < v.num_levels; ++l) {
    for (const auto& f : v.files(l)) edit.added.push_back(f);
  }
  edit.next_file_id = next_file_id;
  edit.last_seq = last_seq;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << EncodeEdit(edit);
    if (!out) return Status::IOError("cannot write " + tmp);
  }
  if (f_ != nullptr) {
    std::fclose(f_);
    f_ = nullptr;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) return Status::IOError("rename manifest: " + ec.message());
  return OpenForAppend(path);
}

}  // namespace prism
