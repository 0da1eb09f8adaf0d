#include "subword/text.h"

namespace subword {

namespace {

// Length of the UTF-8 sequence starting at s[i], or 0 when malformed.
std::size_t sequence_length(std::string_view s, std::size_t i) {
  const auto lead = static_cast<unsigned char>(s[i]);
  std::size_t len = 0;
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) len = 2;
  else if ((lead >> 4) == 0xe) len = 3;
  else if ((lead >> 3) == 0x1e) len = 4;
  else return 0;
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return 0;
  }
  return len;
}

}  // namespace

std::vector<std::string> utf8_chars(std::string_view s) {
  std::vector<std::string> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t len = sequence_length(s, i);
    if (len == 0) len = 1;
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const std::size_t len = sequence_length(s, i);
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (len == 0) {
      // Map stray bytes to the replacement character.
      out.push_back(U'�');
      ++i;
      continue;
    }
    char32_t c = 0;
    switch (len) {
      case 1: c = b0; break;
      case 2: c = b0 & 0x1f; break;
      case 3: c = b0 & 0x0f; break;
      default: c = b0 & 0x07; break;
    }
    for (std::size_t k = 1; k < len; ++k) {
      c = (c << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3f);
    }
    out.push_back(c);
    i += len;
  }
  return out;
}

std::string utf8_encode(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t c : s) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xc0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3f)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xe0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3f)));
    } else {
      out.push_back(static_cast<char>(0xf0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3f)));
    }
  }
  return out;
}

// Covers the scripts of the evaluation languages (Latin incl. Turkish,
// Greek, Cyrillic). Hebrew has no case.
char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c < 0x80) return c;
  if ((c >= 0xc0 && c <= 0xde && c != 0xd7)) return c + 32;
  if (c == 0x130) return U'i';  // Turkish dotted capital I
  if (c >= 0x100 && c <= 0x17f) {
    // Latin Extended-A alternates upper/lower, with an offset run in
    // 0x139..0x148 and 0x179..0x17e.
    if ((c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17e)) {
      return (c % 2 == 1) ? c + 1 : c;
    }
    if (c == 0x178) return 0xff;
    if (c == 0x149 || c == 0x138 || c == 0x17f) return c;
    return (c % 2 == 0) ? c + 1 : c;
  }
  if (c >= 0x391 && c <= 0x3ab && c != 0x3a2) return c + 32;
  if (c >= 0x410 && c <= 0x42f) return c + 32;
  if (c >= 0x400 && c <= 0x40f) return c + 80;
  return c;
}

bool is_decimal_digit(char32_t c) {
  if (c >= U'0' && c <= U'9') return true;
  if (c >= 0x660 && c <= 0x669) return true;    // Arabic-Indic
  if (c >= 0x6f0 && c <= 0x6f9) return true;    // Extended Arabic-Indic
  if (c >= 0x966 && c <= 0x96f) return true;    // Devanagari
  if (c >= 0xff10 && c <= 0xff19) return true;  // fullwidth
  return false;
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  const auto is_space = [](char ch) {
    return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\v' || ch == '\f';
  };
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h) {
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace subword
