#include "villa/mutation.hpp"

#include <cctype>
#include <limits>

#include <fmt/format.h>

namespace villa {

MutationParseError::MutationParseError(const std::string& message, std::string input,
                                       std::size_t span_begin, std::size_t span_end)
    : ParseError(message), input_(std::move(input)), span_begin_(span_begin),
      span_end_(span_end) {}

bool is_amino_acid(char upper) {
  static constexpr std::string_view kAlphabet = "ACDEFGHIKLMNPQRSTVWYX";
  return kAlphabet.find(upper) != std::string_view::npos;
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
char to_upper(char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); }

[[noreturn]] void fail(std::string_view input, std::size_t begin, std::size_t end,
                       std::string_view what) {
  throw MutationParseError(
      fmt::format("invalid mutation '{}': {} at [{}, {})", input, what, begin, end),
      std::string(input), begin, end);
}

}  // namespace

Mutation parse_mutation(std::string_view text) {
  std::size_t first = 0;
  std::size_t last = text.size();
  while (first < last && is_space(text[first])) ++first;
  while (last > first && is_space(text[last - 1])) --last;
  const std::string_view s = text.substr(first, last - first);

  if (s.empty()) fail(s, 0, 0, "empty input");

  std::size_t i = 0;
  if (!is_alpha(s[i])) fail(s, 0, 1, "missing original residue");
  const char original = to_upper(s[i]);
  if (!is_amino_acid(original)) fail(s, 0, 1, "unknown residue code");
  ++i;

  const std::size_t digits_begin = i;
  while (i < s.size() && is_digit(s[i])) ++i;
  if (i == digits_begin) {
    std::size_t end = i;
    while (end < s.size() && !is_digit(s[end])) ++end;
    fail(s, digits_begin, end, is_alpha(s[digits_begin]) ? "multi-letter original residue"
                                                        : "missing position digits");
  }
  std::uint64_t position = 0;
  for (std::size_t k = digits_begin; k < i; ++k) {
    position = position * 10 + static_cast<std::uint64_t>(s[k] - '0');
    if (position > std::numeric_limits<std::uint32_t>::max()) {
      fail(s, digits_begin, i, "position out of range");
    }
  }
  if (position == 0) fail(s, digits_begin, i, "position must be >= 1");

  if (i == s.size()) fail(s, i, i, "missing changed residue");
  if (!is_alpha(s[i])) fail(s, i, s.size(), "unexpected character");
  const char changed = to_upper(s[i]);
  if (!is_amino_acid(changed)) fail(s, i, i + 1, "unknown residue code");
  ++i;
  if (i != s.size()) {
    fail(s, i, s.size(), is_alpha(s[i]) ? "multi-letter changed residue" : "trailing characters");
  }

  return Mutation{original, static_cast<std::uint32_t>(position), changed};
}

std::string normalize(const Mutation& m) {
  return fmt::format("{}{}{}", m.original, m.position, m.changed);
}

std::set<std::string> canonical_keys(const MutationSet& mutations) {
  std::set<std::string> keys;
  for (const auto& m : mutations) keys.insert(normalize(m));
  return keys;
}

}  // namespace villa
