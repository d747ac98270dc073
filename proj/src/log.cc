#include "prism/log.h"

#include <cstdlib>
#include <cstring>
#include <mutex>

namespace prism {

LogLevel MinLogLevel() {
  static const LogLevel level = [] {
    const char* env = std::getenv("PRISM_LOG");
    if (env == nullptr) return LogLevel::kWarn;
    if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
    if (std::strcmp(env, "info") == 0) return LogLevel::kInfo;
    if (std::strcmp(env, "error") == 0) return LogLevel::kError;
    return LogLevel::kWarn;
  }();
  return level;
}

void Log(LogLevel level, std::string_view msg) {
  if (level < MinLogLevel()) return;
  static std::mutex mu;
  static const char* const kNames[] = {"DEBUG", "INFO", "WARN", "ERROR"};
  std::lock_guard<std::mutex> lock(mu);
  std::fprintf(stderr, "[prism %s] %.*s\n", kNames[static_cast<int>(level)],
               static_cast<int>(msg.size()), msg.data());
}

}  // namespace prism
