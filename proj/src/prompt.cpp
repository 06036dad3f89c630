#include "villa/prompt.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "villa/errors.hpp"

namespace villa {
namespace {

constexpr std::string_view kTaskPreamble =
    "You are assisting virologists who curate mutations from the scientific literature.\n"
    "Task: list the mutations in the {protein} protein of {virus} that impact virus-host "
    "interaction, and explain the effect of each mutation on virus-host interaction.\n"
    "Write every mutation as <original amino acid><position><changed amino acid> using "
    "one-letter amino acid codes, for example A123C for a change from A to C at position 123.\n"
    "Respond with a JSON output containing exactly two fields: \"mutations\", a list of "
    "mutation strings, and \"reasoning\", a string describing the effect of each mutation on "
    "virus-host interaction. Example:\n"
    "{{\"mutations\": [\"A123C\"], \"reasoning\": \"A123C increases ...\"}}\n";

constexpr std::string_view kRagInstructions =
    "Retrieve the correct mutations from only within the contextual information provided "
    "below. Do not use any other knowledge. If the context mentions no such mutation, respond "
    "with an empty \"mutations\" list.\n"
    "Each passage of the context starts with the identifier of its publication in square "
    "brackets; cite these identifiers in your reasoning.\n\n"
    "Context:\n{context}\n";

enum class Placeholder { Virus, Protein, Context };

struct Segment {
  bool literal = true;
  std::string text;
  Placeholder placeholder = Placeholder::Virus;
};

std::vector<Segment> split(std::string_view body) {
  std::vector<Segment> segments;
  std::string literal;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (c == '{' && i + 1 < body.size() && body[i + 1] == '{') {
      literal.push_back('{');
      ++i;
    } else if (c == '}' && i + 1 < body.size() && body[i + 1] == '}') {
      literal.push_back('}');
      ++i;
    } else if (c == '{') {
      const auto close = body.find('}', i);
      if (close == std::string_view::npos) {
        throw TemplateError(fmt::format("unterminated placeholder at offset {}", i));
      }
      const std::string_view name = body.substr(i + 1, close - i - 1);
      Segment s{false, {}, Placeholder::Virus};
      if (name == "virus") {
        s.placeholder = Placeholder::Virus;
      } else if (name == "protein") {
        s.placeholder = Placeholder::Protein;
      } else if (name == "context") {
        s.placeholder = Placeholder::Context;
      } else {
        throw TemplateError(fmt::format("unknown placeholder '{{{}}}' at offset {}", name, i));
      }
      if (!literal.empty()) segments.push_back({true, std::move(literal)});
      literal.clear();
      segments.push_back(std::move(s));
      i = close;
    } else if (c == '}') {
      throw TemplateError(fmt::format("unmatched '}}' at offset {}", i));
    } else {
      literal.push_back(c);
    }
  }
  if (!literal.empty()) segments.push_back({true, std::move(literal)});
  return segments;
}

}  // namespace

std::string_view to_string(PromptMode mode) {
  return mode == PromptMode::ZeroShot ? "zero_shot" : "rag";
}

PromptMode parse_prompt_mode(std::string_view text) {
  if (text == "zero_shot") return PromptMode::ZeroShot;
  if (text == "rag") return PromptMode::Rag;
  throw TemplateError(fmt::format("unknown template mode '{}'", text));
}

Context Context::from_entries(std::span<const ScoredEntry> entries) {
  Context ctx;
  ctx.pieces.reserve(entries.size());
  for (const auto& e : entries) {
    ctx.pieces.push_back({e.entry.pub_id, e.entry.entry_id, e.entry.text, e.distance});
  }
  std::stable_sort(ctx.pieces.begin(), ctx.pieces.end(), [](const auto& a, const auto& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.entry_id < b.entry_id;
  });
  for (std::size_t i = 0; i < ctx.pieces.size(); ++i) {
    if (i) ctx.rendered += kContextSeparator;
    ctx.rendered += fmt::format("[{}]\n{}", ctx.pieces[i].pub_id, ctx.pieces[i].text);
  }
  return ctx;
}

std::vector<std::string> Context::pub_ids() const {
  std::vector<std::string> ids;
  for (const auto& p : pieces) {
    if (std::find(ids.begin(), ids.end(), p.pub_id) == ids.end()) ids.push_back(p.pub_id);
  }
  return ids;
}

PromptTemplate::PromptTemplate(std::string template_id, std::string body, PromptMode mode)
    : template_id_(std::move(template_id)), body_(std::move(body)), mode_(mode) {
  const auto segments = split(body_);
  const auto contexts = std::count_if(segments.begin(), segments.end(), [](const Segment& s) {
    return !s.literal && s.placeholder == Placeholder::Context;
  });
  if (mode_ == PromptMode::ZeroShot && contexts != 0) {
    throw TemplateError(fmt::format("zero-shot template '{}' must not contain {{context}}",
                                    template_id_));
  }
  if (mode_ == PromptMode::Rag && contexts != 1) {
    throw TemplateError(fmt::format("RAG template '{}' must contain {{context}} exactly once, found {}",
                                    template_id_, contexts));
  }
}

PromptTemplate PromptTemplate::default_zero_shot() {
  return PromptTemplate("default-zero-shot", std::string(kTaskPreamble), PromptMode::ZeroShot);
}

PromptTemplate PromptTemplate::default_rag() {
  return PromptTemplate("default-rag", fmt::format("{}\n{}", kTaskPreamble, kRagInstructions),
                        PromptMode::Rag);
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TemplateError(fmt::format("cannot open template '{}'", path.string()));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    return PromptTemplate(j.at("template_id").get<std::string>(), j.at("body").get<std::string>(),
                          parse_prompt_mode(j.at("mode").get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw TemplateError(fmt::format("template '{}': {}", path.string(), e.what()));
  }
}

std::string PromptTemplate::render(std::string_view virus, std::string_view protein,
                                   const Context* context) const {
  if (mode_ == PromptMode::ZeroShot && context != nullptr) {
    throw TemplateError(fmt::format("zero-shot template '{}' given a context", template_id_));
  }
  if (mode_ == PromptMode::Rag && context == nullptr) {
    throw TemplateError(fmt::format("RAG template '{}' needs a context", template_id_));
  }
  std::string out;
  for (const auto& s : split(body_)) {
    if (s.literal) {
      out += s.text;
      continue;
    }
    switch (s.placeholder) {
      case Placeholder::Virus:
        out += virus;
        break;
      case Placeholder::Protein:
        out += protein;
        break;
      case Placeholder::Context:
        out += context->rendered;
        break;
    }
  }
  return out;
}

}  // namespace villa
