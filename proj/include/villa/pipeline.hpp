#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "villa/embedding.hpp"
#include "villa/mutation.hpp"
#include "villa/prompt.hpp"
#include "villa/responder.hpp"
#include "villa/vectorstore.hpp"

namespace villa {

enum class Method { ZeroShot, RagAbstracts, RagFulltext, Villa };

/// "zero-shot", "rag-abstracts", "rag-fulltext", "villa".
std::string_view to_string(Method method);
Method parse_method(std::string_view text);

/// Retrieval knobs. `k`/`t` drive the single-stage baselines; `k_a`/`t_a`
/// and `k_c`/`t_c` drive the publication and chunk levels of the two-level
/// method.
struct RetrievalConfig {
  std::size_t k = 150;
  double t = 0.5;
  std::size_t k_a = 160;
  double t_a = 0.5;
  std::size_t k_c = 160;
  double t_c = 0.5;

  /// Throws InvalidParameters when a k is 0 or a threshold leaves [0, 2].
  void validate() const;
  bool operator==(const RetrievalConfig&) const = default;
};

/// Text embedded to query the stores.
enum class QueryMode {
  Prompt,  // the rendered prompt with an empty context
  Short,   // "mutations in {protein} of {virus}"
};

std::string_view to_string(QueryMode mode);
QueryMode parse_query_mode(std::string_view text);

struct RetrievedPiece {
  std::string entry_id;
  std::string pub_id;
  double distance = 0.0;

  bool operator==(const RetrievedPiece&) const = default;
};

/// Outcome of the generation step for one selected publication.
struct PublicationResult {
  std::string pub_id;
  double distance = 0.0;  // publication-level distance
  MutationSet mutations;
  std::string reasoning;
  std::string raw_response;
  std::vector<std::string> rejects;
  std::vector<RetrievedPiece> context;
  std::string error;  // responder or parse failure; mutations empty when set

  bool operator==(const PublicationResult&) const = default;
};

struct ExtractionResult {
  std::string protein;
  Method method = Method::ZeroShot;
  MutationSet mutations;
  std::string reasoning;
  std::string raw_response;
  std::vector<std::string> rejects;
  std::optional<std::vector<PublicationResult>> per_publication;
  std::set<std::string> context_pub_ids;
  std::vector<RetrievedPiece> context;
  std::string error;  // malformed response; scoring treats mutations as empty

  bool operator==(const ExtractionResult&) const = default;
};

struct QueryOptions {
  QueryMode mode = QueryMode::Prompt;
  /// Bound on concurrent responder calls in the two-level method.
  std::size_t jobs = 1;
};

/// Text used to retrieve context for `protein`.
std::string retrieval_query(const PromptTemplate& tpl, std::string_view virus,
                            std::string_view protein, QueryMode mode);

ExtractionResult zero_shot(const Responder& responder, const PromptTemplate& tpl,
                           std::string_view virus, std::string_view protein);

ExtractionResult rag_abstracts(const Embedder& embedder, const Responder& responder,
                               const VectorStore& abstracts, const RetrievalConfig& config,
                               const PromptTemplate& tpl, std::string_view virus,
                               std::string_view protein, const QueryOptions& options = {});

ExtractionResult rag_fulltext(const Embedder& embedder, const Responder& responder,
                              const VectorStore& chunks, const RetrievalConfig& config,
                              const PromptTemplate& tpl, std::string_view virus,
                              std::string_view protein, const QueryOptions& options = {});

/// Two-level retrieval: select up to k_a publications by abstract, then for
/// each one retrieve up to k_c of its chunks and query the responder once
/// with that publication's context. Mutations are the union over
/// publications; a failed publication is recorded in its slot.
ExtractionResult villa(const Embedder& embedder, const Responder& responder,
                       const VectorStore& abstracts, const VectorStore& chunks,
                       const RetrievalConfig& config, const PromptTemplate& tpl,
                       std::string_view virus, std::string_view protein,
                       const QueryOptions& options = {});

struct Stores {
  const VectorStore* abstracts = nullptr;
  const VectorStore* chunks = nullptr;
};

/// Dispatches to the method; `zero_shot_tpl` is used only for ZeroShot.
ExtractionResult run_method(Method method, const Embedder& embedder, const Responder& responder,
                            const Stores& stores, const RetrievalConfig& config,
                            const PromptTemplate& zero_shot_tpl, const PromptTemplate& rag_tpl,
                            std::string_view virus, std::string_view protein,
                            const QueryOptions& options = {});

}  // namespace villa
