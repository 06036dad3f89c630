#include "villa/unicode.hpp"

#include <algorithm>

namespace villa::unicode {
namespace {

// Length of a well-formed sequence starting at `i`, or 0 if malformed.
std::size_t sequence_length(std::string_view text, std::size_t i) {
  const auto lead = static_cast<unsigned char>(text[i]);
  std::size_t len = 0;
  char32_t cp = 0;
  if (lead < 0x80) {
    return 1;
  } else if ((lead & 0xE0) == 0xC0) {
    len = 2;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4;
    cp = lead & 0x07;
  } else {
    return 0;
  }
  if (i + len > text.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto c = static_cast<unsigned char>(text[i + k]);
    if ((c & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (c & 0x3F);
  }
  // Reject overlong forms, surrogates and values past U+10FFFF.
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    return 0;
  }
  return len;
}

}  // namespace

std::vector<std::size_t> code_point_offsets(std::string_view text) {
  std::vector<std::size_t> offsets;
  offsets.reserve(text.size() + 1);
  std::size_t i = 0;
  while (i < text.size()) {
    offsets.push_back(i);
    i += std::max<std::size_t>(1, sequence_length(text, i));
  }
  offsets.push_back(text.size());
  return offsets;
}

std::size_t length(std::string_view text) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    i += std::max<std::size_t>(1, sequence_length(text, i));
    ++n;
  }
  return n;
}

std::string substr(std::string_view text, std::size_t begin, std::size_t count) {
  const auto offsets = code_point_offsets(text);
  const std::size_t n = offsets.size() - 1;
  begin = std::min(begin, n);
  const std::size_t end = std::min(n, begin + std::min(count, n - begin));
  return std::string(text.substr(offsets[begin], offsets[end] - offsets[begin]));
}

bool valid(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t len = sequence_length(text, i);
    if (len == 0) return false;
    i += len;
  }
  return true;
}

}  // namespace villa::unicode
