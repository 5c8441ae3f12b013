#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace iwas::utf8 {

// All span arithmetic in this project is in Unicode scalar values, never
// bytes. These helpers convert between the two views of a UTF-8 string and
// throw std::invalid_argument on malformed input (overlong forms,
// surrogates, truncated sequences, out-of-range code points).

std::vector<char32_t> decode(std::string_view s);
std::string encode(const std::vector<char32_t>& cps);
void append(std::string& out, char32_t cp);

// Number of Unicode scalar values in s.
std::size_t length(std::string_view s);

// Byte offset of the cp_offset-th scalar value; cp_offset may equal
// length(s), in which case s.size() is returned.
std::size_t byte_offset(std::string_view s, std::size_t cp_offset);

// Substring by scalar-value offsets, [begin, end).
std::string substr(std::string_view s, std::size_t cp_begin, std::size_t cp_end);

// Unicode White_Space property (the handful of members spelled out here).
bool is_space(char32_t cp);

}  // namespace iwas::utf8
