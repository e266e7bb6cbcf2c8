#include "defitex/textutil.hpp"

namespace defitex::text {

std::size_t cp_len(std::string_view s, std::size_t i) {
  const unsigned char b = static_cast<unsigned char>(s[i]);
  std::size_t n = 1;
  if ((b & 0x80u) == 0x00u) n = 1;
  else if ((b & 0xE0u) == 0xC0u) n = 2;
  else if ((b & 0xF0u) == 0xE0u) n = 3;
  else if ((b & 0xF8u) == 0xF0u) n = 4;
  if (i + n > s.size()) return 1;
  for (std::size_t k = 1; k < n; ++k) {
    if ((static_cast<unsigned char>(s[i + k]) & 0xC0u) != 0x80u) return 1;
  }
  return n;
}

char32_t cp_at(std::string_view s, std::size_t i) {
  const std::size_t n = cp_len(s, i);
  const unsigned char b0 = static_cast<unsigned char>(s[i]);
  if (n == 1) return b0;
  char32_t cp = 0;
  switch (n) {
    case 2: cp = b0 & 0x1Fu; break;
    case 3: cp = b0 & 0x0Fu; break;
    default: cp = b0 & 0x07u; break;
  }
  for (std::size_t k = 1; k < n; ++k) {
    cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3Fu);
  }
  return cp;
}

std::size_t cp_count(std::string_view s) {
  std::size_t i = 0, n = 0;
  while (i < s.size()) {
    i += cp_len(s, i);
    ++n;
  }
  return n;
}

std::string cp_to_utf8(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::string normalize_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
    } else {
      if (pending) out.push_back(' ');
      pending = false;
      out.push_back(c);
    }
  }
  return out;
}

namespace {

char32_t lower_cp(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  // Latin-1 capitals, skipping the multiplication sign slot.
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 0x20;
  // Greek capitals Alpha..Omega (0x03A2 is unassigned).
  if (cp >= 0x0391 && cp <= 0x03A9 && cp != 0x03A2) return cp + 0x20;
  return cp;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const std::size_t n = cp_len(s, i);
    if (n == 1) {
      char c = s[i];
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 0x20);
      out.push_back(c);
    } else {
      out += cp_to_utf8(lower_cp(cp_at(s, i)));
    }
    i += n;
  }
  return out;
}

std::string strip_spaces(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (!is_space(c)) out.push_back(c);
  }
  return out;
}

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char b = static_cast<unsigned char>(s[i]);
    std::size_t n;
    if (b < 0x80u) n = 1;
    else if ((b & 0xE0u) == 0xC0u) n = 2;
    else if ((b & 0xF0u) == 0xE0u) n = 3;
    else if ((b & 0xF8u) == 0xF0u) n = 4;
    else return false;
    if (i + n > s.size()) return false;
    for (std::size_t k = 1; k < n; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0u) != 0x80u) return false;
    }
    // Reject overlong encodings of ASCII.
    if (n == 2 && (b & 0x1Eu) == 0) return false;
    i += n;
  }
  return true;
}

std::string latin1_to_utf8(std::string_view s) {
  std::string out;
  out.reserve(s.size() * 2);
  for (char c : s) {
    const unsigned char b = static_cast<unsigned char>(c);
    if (b < 0x80u) {
      out.push_back(c);
    } else {
      out.push_back(static_cast<char>(0xC0 | (b >> 6)));
      out.push_back(static_cast<char>(0x80 | (b & 0x3F)));
    }
  }
  return out;
}

}  // namespace defitex::text
