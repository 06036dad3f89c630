#include "villa/response_parser.hpp"

#include <optional>

#include <json.hpp>

#include "villa/errors.hpp"

namespace villa {
namespace {

// End (exclusive) of the brace-balanced span starting at `open`, honouring
// JSON string literals; npos when unbalanced.
std::size_t balanced_end(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::optional<nlohmann::json> candidate_at(std::string_view raw, std::size_t open) {
  const std::size_t end = balanced_end(raw, open);
  if (end == std::string_view::npos) return std::nullopt;
  auto j = nlohmann::json::parse(raw.substr(open, end - open), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  const auto m = j.find("mutations");
  const auto r = j.find("reasoning");
  if (m == j.end() || !m->is_array() || r == j.end() || !r->is_string()) return std::nullopt;
  return j;
}

}  // namespace

ParsedResponse parse_response(std::string_view raw) {
  for (auto open = raw.find('{'); open != std::string_view::npos; open = raw.find('{', open + 1)) {
    const auto j = candidate_at(raw, open);
    if (!j) continue;

    ParsedResponse out;
    out.reasoning = (*j)["reasoning"].get<std::string>();
    for (const auto& item : (*j)["mutations"]) {
      const std::string text = item.is_string() ? item.get<std::string>() : item.dump();
      try {
        out.mutations.insert(parse_mutation(text));
      } catch (const MutationParseError&) {
        out.rejects.push_back(text);
      }
    }
    return out;
  }
  throw MalformedResponse("response contains no JSON object with 'mutations' and 'reasoning'");
}

}  // namespace villa
