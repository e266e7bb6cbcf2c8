#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace defitex::text {

// Byte length of the UTF-8 sequence starting at s[i]; 1 for malformed bytes.
std::size_t cp_len(std::string_view s, std::size_t i);

// Code point starting at s[i]; malformed bytes decode as their byte value.
char32_t cp_at(std::string_view s, std::size_t i);

std::size_t cp_count(std::string_view s);

// Encode one code point as UTF-8.
std::string cp_to_utf8(char32_t cp);

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Collapse whitespace runs to a single space and trim both ends.
std::string normalize_ws(std::string_view s);

// Lowercase ASCII, Latin-1 letters and Greek capitals. Length-preserving,
// so byte offsets into the result line up with the input.
std::string to_lower(std::string_view s);

// Remove every whitespace character (the no-space form used in matching).
std::string strip_spaces(std::string_view s);

// True when the whole string is well-formed UTF-8.
bool valid_utf8(std::string_view s);

// Reinterpret bytes as Latin-1 and re-encode as UTF-8.
std::string latin1_to_utf8(std::string_view s);

}  // namespace defitex::text
