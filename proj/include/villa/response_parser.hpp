#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "villa/mutation.hpp"

namespace villa {

struct ParsedResponse {
  MutationSet mutations;
  std::string reasoning;
  /// Items of the "mutations" array that did not parse as substitutions.
  std::vector<std::string> rejects;
};

/// Finds the first well-formed JSON object in `raw` that has a "mutations"
/// array and a "reasoning" string. The object may be surrounded by prose or
/// sit inside a fenced code block. Throws MalformedResponse when there is
/// none.
ParsedResponse parse_response(std::string_view raw);

}  // namespace villa
