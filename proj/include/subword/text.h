#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace subword {

// Splits a UTF-8 string into its code point sequences. Invalid bytes are
// kept as single-byte units so that concatenating the result always
// reproduces the input.
std::vector<std::string> utf8_chars(std::string_view s);

std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);

char32_t to_lower(char32_t c);
bool is_decimal_digit(char32_t c);

std::vector<std::string_view> split_whitespace(std::string_view s);

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 14695981039346656037ull);

}  // namespace subword
