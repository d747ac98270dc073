#pragma once

// Plain-text key=value files. '#' starts a comment; blank lines are
// ignored; later keys override earlier ones.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prism/status.h"

namespace prism {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

Status ParseKeyValues(std::string_view text, KeyValues* out);
Status ReadKeyValueFile(const std::string& path, KeyValues* out);

// Accepts an optional K/M/G/T suffix (powers of 1024).
Status ParseSize(std::string_view s, uint64_t* out);
Status ParseDouble(std::string_view s, double* out);
Status ParseInt(std::string_view s, int64_t* out);
Status ParseBool(std::string_view s, bool* out);

}  // namespace prism
