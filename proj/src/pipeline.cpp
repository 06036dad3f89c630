#include "villa/pipeline.hpp"

#include <fmt/format.h>

#include "villa/errors.hpp"
#include "villa/parallel.hpp"
#include "villa/response_parser.hpp"

namespace villa {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::ZeroShot:
      return "zero-shot";
    case Method::RagAbstracts:
      return "rag-abstracts";
    case Method::RagFulltext:
      return "rag-fulltext";
    case Method::Villa:
      return "villa";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  for (Method m : {Method::ZeroShot, Method::RagAbstracts, Method::RagFulltext, Method::Villa}) {
    if (text == to_string(m)) return m;
  }
  throw InvalidParameters(fmt::format(
      "unknown method '{}' (expected zero-shot, rag-abstracts, rag-fulltext or villa)", text));
}

std::string_view to_string(QueryMode mode) { return mode == QueryMode::Prompt ? "prompt" : "short"; }

QueryMode parse_query_mode(std::string_view text) {
  if (text == "prompt") return QueryMode::Prompt;
  if (text == "short") return QueryMode::Short;
  throw InvalidParameters(fmt::format("unknown query mode '{}' (expected prompt or short)", text));
}

void RetrievalConfig::validate() const {
  for (auto [name, value] : {std::pair{"k", k}, {"k_a", k_a}, {"k_c", k_c}}) {
    if (value < 1) throw InvalidParameters(fmt::format("{} must be >= 1", name));
  }
  for (auto [name, value] : {std::pair{"t", t}, {"t_a", t_a}, {"t_c", t_c}}) {
    if (!(value >= 0.0 && value <= 2.0)) {
      throw InvalidParameters(fmt::format("{} = {} is outside [0, 2]", name, value));
    }
  }
}

std::string retrieval_query(const PromptTemplate& tpl, std::string_view virus,
                            std::string_view protein, QueryMode mode) {
  if (mode == QueryMode::Short) return fmt::format("mutations in {} of {}", protein, virus);
  if (tpl.mode() == PromptMode::Rag) {
    const Context empty;
    return tpl.render(virus, protein, &empty);
  }
  return tpl.render(virus, protein);
}

namespace {

std::vector<RetrievedPiece> pieces_of(const Context& ctx) {
  std::vector<RetrievedPiece> out;
  out.reserve(ctx.pieces.size());
  for (const auto& p : ctx.pieces) out.push_back({p.entry_id, p.pub_id, p.distance});
  return out;
}

struct Generation {
  MutationSet mutations;
  std::string reasoning;
  std::string raw;
  std::vector<std::string> rejects;
  std::string error;
};

Generation generate(const Responder& responder, const std::string& prompt, std::string_view virus,
                    std::string_view protein, const Context* context) {
  Generation g;
  g.raw = responder.respond({prompt, virus, protein, context});
  try {
    auto parsed = parse_response(g.raw);
    g.mutations = std::move(parsed.mutations);
    g.reasoning = std::move(parsed.reasoning);
    g.rejects = std::move(parsed.rejects);
  } catch (const MalformedResponse& e) {
    g.error = e.what();
  }
  return g;
}

ExtractionResult single_stage(Method method, const Embedder& embedder, const Responder& responder,
                              const VectorStore& store, const RetrievalConfig& config,
                              const PromptTemplate& tpl, std::string_view virus,
                              std::string_view protein, const QueryOptions& options) {
  config.validate();
  if (tpl.mode() != PromptMode::Rag) {
    throw TemplateError(fmt::format("{} needs a RAG template", to_string(method)));
  }
  if (store.dim() != embedder.dim()) {
    throw InvalidParameters(fmt::format("store dimension {} does not match embedder dimension {}",
                                        store.dim(), embedder.dim()));
  }
  const auto query = embedder.embed(retrieval_query(tpl, virus, protein, options.mode),
                                    EmbedRole::Query);
  const auto hits = store.top_k(query, config.k, config.t);
  const Context ctx = Context::from_entries(hits);
  const std::string prompt = tpl.render(virus, protein, &ctx);

  auto g = generate(responder, prompt, virus, protein, &ctx);
  ExtractionResult r;
  r.protein = std::string(protein);
  r.method = method;
  r.mutations = std::move(g.mutations);
  r.reasoning = std::move(g.reasoning);
  r.raw_response = std::move(g.raw);
  r.rejects = std::move(g.rejects);
  r.error = std::move(g.error);
  r.context = pieces_of(ctx);
  for (const auto& p : ctx.pieces) r.context_pub_ids.insert(p.pub_id);
  return r;
}

}  // namespace

ExtractionResult zero_shot(const Responder& responder, const PromptTemplate& tpl,
                           std::string_view virus, std::string_view protein) {
  if (tpl.mode() != PromptMode::ZeroShot) {
    throw TemplateError("zero-shot needs a zero-shot template");
  }
  const std::string prompt = tpl.render(virus, protein);
  auto g = generate(responder, prompt, virus, protein, nullptr);
  ExtractionResult r;
  r.protein = std::string(protein);
  r.method = Method::ZeroShot;
  r.mutations = std::move(g.mutations);
  r.reasoning = std::move(g.reasoning);
  r.raw_response = std::move(g.raw);
  r.rejects = std::move(g.rejects);
  r.error = std::move(g.error);
  return r;
}

ExtractionResult rag_abstracts(const Embedder& embedder, const Responder& responder,
                               const VectorStore& abstracts, const RetrievalConfig& config,
                               const PromptTemplate& tpl, std::string_view virus,
                               std::string_view protein, const QueryOptions& options) {
  return single_stage(Method::RagAbstracts, embedder, responder, abstracts, config, tpl, virus,
                      protein, options);
}

ExtractionResult rag_fulltext(const Embedder& embedder, const Responder& responder,
                              const VectorStore& chunks, const RetrievalConfig& config,
                              const PromptTemplate& tpl, std::string_view virus,
                              std::string_view protein, const QueryOptions& options) {
  return single_stage(Method::RagFulltext, embedder, responder, chunks, config, tpl, virus,
                      protein, options);
}

ExtractionResult villa(const Embedder& embedder, const Responder& responder,
                       const VectorStore& abstracts, const VectorStore& chunks,
                       const RetrievalConfig& config, const PromptTemplate& tpl,
                       std::string_view virus, std::string_view protein,
                       const QueryOptions& options) {
  config.validate();
  if (tpl.mode() != PromptMode::Rag) throw TemplateError("villa needs a RAG template");
  if (abstracts.dim() != embedder.dim() || chunks.dim() != embedder.dim()) {
    throw InvalidParameters(fmt::format(
        "store dimensions ({}, {}) do not match embedder dimension {}", abstracts.dim(),
        chunks.dim(), embedder.dim()));
  }

  const auto query = embedder.embed(retrieval_query(tpl, virus, protein, options.mode),
                                    EmbedRole::Query);
  const auto selected = abstracts.top_k(query, config.k_a, config.t_a);

  std::vector<PublicationResult> slots(selected.size());
  parallel_for(selected.size(), options.jobs, [&](std::size_t i) {
    PublicationResult& slot = slots[i];
    slot.pub_id = selected[i].entry.pub_id;
    slot.distance = selected[i].distance;

    const auto hits = chunks.top_k(query, config.k_c, config.t_c, {slot.pub_id});
    const Context ctx = Context::from_entries(hits);
    slot.context = pieces_of(ctx);
    const std::string prompt = tpl.render(virus, protein, &ctx);
    try {
      auto g = generate(responder, prompt, virus, protein, &ctx);
      slot.mutations = std::move(g.mutations);
      slot.reasoning = std::move(g.reasoning);
      slot.raw_response = std::move(g.raw);
      slot.rejects = std::move(g.rejects);
      slot.error = std::move(g.error);
    } catch (const Error& e) {
      slot.error = e.what();
    }
  });

  ExtractionResult r;
  r.protein = std::string(protein);
  r.method = Method::Villa;
  for (const auto& slot : slots) {
    r.context_pub_ids.insert(slot.pub_id);
    r.mutations.insert(slot.mutations.begin(), slot.mutations.end());
    r.rejects.insert(r.rejects.end(), slot.rejects.begin(), slot.rejects.end());
    r.context.insert(r.context.end(), slot.context.begin(), slot.context.end());
    if (!slot.reasoning.empty()) {
      if (!r.reasoning.empty()) r.reasoning += "\n\n";
      r.reasoning += fmt::format("[{}] {}", slot.pub_id, slot.reasoning);
    }
  }
  r.per_publication = std::move(slots);
  return r;
}

ExtractionResult run_method(Method method, const Embedder& embedder, const Responder& responder,
                            const Stores& stores, const RetrievalConfig& config,
                            const PromptTemplate& zero_shot_tpl, const PromptTemplate& rag_tpl,
                            std::string_view virus, std::string_view protein,
                            const QueryOptions& options) {
  auto need = [&](const VectorStore* store, const char* what) -> const VectorStore& {
    if (store == nullptr) {
      throw InvalidParameters(fmt::format("{} requires the {} store", to_string(method), what));
    }
    return *store;
  };
  switch (method) {
    case Method::ZeroShot:
      return zero_shot(responder, zero_shot_tpl, virus, protein);
    case Method::RagAbstracts:
      return rag_abstracts(embedder, responder, need(stores.abstracts, "abstracts"), config,
                           rag_tpl, virus, protein, options);
    case Method::RagFulltext:
      return rag_fulltext(embedder, responder, need(stores.chunks, "full-text"), config, rag_tpl,
                          virus, protein, options);
    case Method::Villa:
      return villa(embedder, responder, need(stores.abstracts, "abstracts"),
                   need(stores.chunks, "full-text"), config, rag_tpl, virus, protein, options);
  }
  throw InvalidParameters("unknown method");
}

}  // namespace villa
