#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "villa/vectorstore.hpp"

namespace villa {

enum class PromptMode { ZeroShot, Rag };

std::string_view to_string(PromptMode mode);
PromptMode parse_prompt_mode(std::string_view text);

struct ContextPiece {
  std::string pub_id;
  std::string entry_id;
  std::string text;
  double distance = 0.0;
};

/// Retrieved text inserted into a RAG prompt. Pieces are ordered by
/// increasing distance; `rendered` joins them, each tagged with its
/// publication id, using kContextSeparator.
struct Context {
  static constexpr std::string_view kContextSeparator = "\n\n---\n\n";

  std::vector<ContextPiece> pieces;
  std::string rendered;

  static Context from_entries(std::span<const ScoredEntry> entries);
  std::vector<std::string> pub_ids() const;  // first-occurrence order
  bool empty() const { return pieces.empty(); }
};

/// Prompt body with {virus}, {protein} and (RAG only) {context}
/// placeholders. Literal braces are written {{ and }}.
class PromptTemplate {
 public:
  /// Throws TemplateError when the body references an unknown placeholder,
  /// has an unbalanced brace, or violates the mode's {context} rule.
  PromptTemplate(std::string template_id, std::string body, PromptMode mode);

  static PromptTemplate default_zero_shot();
  static PromptTemplate default_rag();
  /// JSON file {"template_id", "mode": "zero_shot"|"rag", "body"}.
  static PromptTemplate load(const std::filesystem::path& path);

  const std::string& id() const { return template_id_; }
  const std::string& body() const { return body_; }
  PromptMode mode() const { return mode_; }

  /// Zero-shot templates take no context; RAG templates require one (it may
  /// be empty).
  std::string render(std::string_view virus, std::string_view protein,
                     const Context* context = nullptr) const;

 private:
  std::string template_id_;
  std::string body_;
  PromptMode mode_;
};

}  // namespace villa
