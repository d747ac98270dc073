#pragma once

#include <cstdio>
#include <string_view>

namespace prism {

enum class LogLevel { kDebug, kInfo, kWarn, kError };

// Process-wide minimum level; PRISM_LOG=debug|info|warn|error overrides.
LogLevel MinLogLevel();

void Log(LogLevel level, std::string_view msg);

}  // namespace prism
