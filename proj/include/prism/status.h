#pragma once

#include <string>
#include <string_view>
#include <utility>

namespace prism {

// Result of an engine operation. Cheap to copy when ok().
class Status {
 public:
  enum class Code {
    kOk = 0,
    kNotFound,
    kCorruption,
    kIOError,
    kInvalidArgument,
    kClosed,
    kCapacityExceeded,
    kBusy,
  };

  Status() = default;

  static Status OK() { return Status(); }
  static Status NotFound(std::string_view msg = {}) { return Status(Code::kNotFound, msg); }
  static Status Corruption(std::string_view msg) { return Status(Code::kCorruption, msg); }
  static Status IOError(std::string_view msg) { return Status(Code::kIOError, msg); }
  static Status InvalidArgument(std::string_view msg) {
    return Status(Code::kInvalidArgument, msg);
  }
  static Status Closed() { return Status(Code::kClosed, "engine closed"); }
  static Status CapacityExceeded(std::string_view msg) {
    return Status(Code::kCapacityExceeded, msg);
  }
  static Status Busy(std::string_view msg) { return Status(Code::kBusy, msg); }

  bool ok() const { return code_ == Code::kOk; }
  bool IsNotFound() const { return code_ == Code::kNotFound; }
  bool IsCorruption() const { return code_ == Code::kCorruption; }
  bool IsIOError() const { return code_ == Code::kIOError; }
  bool IsInvalidArgument() const { return code_ == Code::kInvalidArgument; }
  bool IsClosed() const { return code_ == Code::kClosed; }
  bool IsCapacityExceeded() const { return code_ == Code::kCapacityExceeded; }

  Code code() const { return code_; }
  const std::string& message() const { return msg_; }

  std::string ToString() const {
    const char* name = "OK";
    switch (code_) {
      case Code::kOk: return "OK";
      case Code::kNotFound: name = "NotFound"; break;
      case Code::kCorruption: name = "Corruption"; break;
      case Code::kIOError: name = "IOError"; break;
      case Code::kInvalidArgument: name = "InvalidArgument"; break;
      case Code::kClosed: name = "Closed"; break;
      case Code::kCapacityExceeded: name = "CapacityExceeded"; break;
      case Code::kBusy: name = "Busy"; break;
    }
    return msg_.empty() ? std::string(name) : std::string(name) + ": " + msg_;
  }

 private:
  Status(Code code, std::string_view msg) : code_(code), msg_(msg) {}

  Code code_ = Code::kOk;
  std::string msg_;
};

}  // namespace prism
