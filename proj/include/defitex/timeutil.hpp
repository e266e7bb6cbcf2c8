#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace defitex::timeutil {

// Accepts "YYYY-MM-DD", "YYYY-MM-DD HH:MM:SS" and "YYYY-MM-DDTHH:MM:SS",
// with an optional trailing "Z" or "+HH:MM"/"-HH:MM" offset.
std::optional<std::int64_t> parse_timestamp(std::string_view s);

// Canonical UTC form "YYYY-MM-DDTHH:MM:SSZ".
std::string format_utc(std::int64_t epoch_seconds);

}  // namespace defitex::timeutil
