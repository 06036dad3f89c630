#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>

#include "villa/errors.hpp"

namespace villa {

/// Amino-acid substitution in `<original><position><changed>` notation,
/// e.g. E627K.
struct Mutation {
  char original = 'X';
  std::uint32_t position = 1;
  char changed = 'X';

  auto operator<=>(const Mutation&) const = default;
};

using MutationSet = std::set<Mutation>;

/// Parse failure with the offending span, in bytes of the trimmed input.
class MutationParseError : public ParseError {
 public:
  MutationParseError(const std::string& message, std::string input,
                     std::size_t span_begin, std::size_t span_end);
  const std::string& input() const noexcept { return input_; }
  std::size_t span_begin() const noexcept { return span_begin_; }
  std::size_t span_end() const noexcept { return span_end_; }

 private:
  std::string input_;
  std::size_t span_begin_;
  std::size_t span_end_;
};

/// The 20 standard residue codes plus X.
bool is_amino_acid(char upper);

/// Accepts surrounding whitespace and lowercase letters. Grammar after
/// trimming: one residue letter, decimal digits (value >= 1), one residue
/// letter. Throws MutationParseError otherwise.
Mutation parse_mutation(std::string_view text);

/// Canonical key: uppercase, no leading zeros. parse(normalize(m)) == m.
std::string normalize(const Mutation& m);

/// Original residue equals changed residue (e.g. A123A). Parsed without
/// complaint; reported by lint tooling.
inline bool is_synonymous(const Mutation& m) { return m.original == m.changed; }

std::set<std::string> canonical_keys(const MutationSet& mutations);

}  // namespace villa
