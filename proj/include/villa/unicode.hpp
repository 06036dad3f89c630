#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace villa::unicode {

/// Byte offset of every code point in `text`, plus a trailing entry equal
/// to text.size(). Invalid UTF-8 bytes count as one code point each.
std::vector<std::size_t> code_point_offsets(std::string_view text);

/// Number of Unicode scalar values in `text`.
std::size_t length(std::string_view text);

/// Substring by code-point range [begin, begin + count).
std::string substr(std::string_view text, std::size_t begin, std::size_t count);

/// True if `text` is well-formed UTF-8.
bool valid(std::string_view text);

}  // namespace villa::unicode
