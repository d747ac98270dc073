#include "prism/config.h"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace prism {

namespace {
std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}
}  // namespace

Status ParseKeyValues(std::string_view text, KeyValues* out) {
  size_t lineno = 0;
  while (!text.empty()) {
    ++lineno;
    const size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    const size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      return Status::InvalidArgument("line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string_view key = Trim(line.substr(0, eq));
    if (key.empty()) return Status::InvalidArgument("line " + std::to_string(lineno) + ": empty key");
    out->emplace_back(std::string(key), std::string(Trim(line.substr(eq + 1))));
  }
  return Status::OK();
}

Status ReadKeyValueFile(const std::string& path, KeyValues* out) {
  std::ifstream in(path);
  if (!in) return Status::IOError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Status s = ParseKeyValues(ss.str(), out);
  if (!s.ok()) return Status::InvalidArgument(path + ": " + s.message());
  return s;
}

Status ParseSize(std::string_view s, uint64_t* out) {
  s = Trim(s);
  if (s.empty()) return Status::InvalidArgument("empty size");
  uint64_t mult = 1;
  switch (s.back()) {
    case 'k':
    case 'K':
      mult = 1ull << 10;
      break;
    case 'm':
    case 'M':
      mult = 1ull << 20;
      break;
    case 'g':
    case 'G':
      mult = 1ull << 30;
      break;
    case 't':
    case 'T':
      mult = 1ull << 40;
      break;
    default:
      break;
  }
  if (mult != 1) s.remove_suffix(1);
  double v = 0;
  Status st = ParseDouble(s, &v);
  if (!st.ok() || v < 0) return Status::InvalidArgument("bad size '" + std::string(s) + "'");
  *out = static_cast<uint64_t>(v * static_cast<double>(mult));
  return Status::OK();
}

Status ParseDouble(std::string_view s, double* out) {
  const std::string str(Trim(s));
  if (str.empty()) return Status::InvalidArgument("empty number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(str.c_str(), &end);
  if (errno != 0 || end != str.c_str() + str.size()) {
    return Status::InvalidArgument("bad number '" + str + "'");
  }
  *out = v;
  return Status::OK();
}

Status ParseInt(std::string_view s, int64_t* out) {
  s = Trim(s);
  int64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    return Status::InvalidArgument("bad integer '" + std::string(s) + "'");
  }
  *out = v;
  return Status::OK();
}

Status ParseBool(std::string_view s, bool* out) {
  s = Trim(s);
  if (s == "1" || s == "true" || s == "yes" || s == "on") {
    *out = true;
  } else if (s == "0" || s == "false" || s == "no" || s == "off") {
    *out = false;
  } else {
    return Status::InvalidArgument("bad boolean '" + std::string(s) + "'");
  }
  return Status::OK();
}

}  // namespace prism
