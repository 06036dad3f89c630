#include "villa/ingest.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "villa/errors.hpp"
#include "villa/unicode.hpp"

namespace villa {
namespace {

void insert_all(VectorStore& store, std::vector<DatastoreEntry> entries, const Embedder& embedder) {
  std::vector<std::string> texts;
  texts.reserve(entries.size());
  for (const auto& e : entries) texts.push_back(e.text);
  auto batch = embedder.embed_batch(texts, EmbedRole::Document);
  if (!batch.ok()) {
    const auto& first = batch.errors.front();
    throw ContractViolation(fmt::format("embedding failed for {} of {} items; first: '{}': {}",
                                        batch.errors.size(), entries.size(),
                                        entries[first.index].entry_id, first.message));
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    entries[i].vector = std::move(batch.vectors[i]);
    store.insert(std::move(entries[i]));
  }
}

}  // namespace

BuiltStores build_stores(const Corpus& corpus, const Embedder& embedder,
                         const StoreBuildOptions& options) {
  BuiltStores out{VectorStore(embedder.dim()), VectorStore(embedder.dim()), {}};
  auto warn = [&](std::string msg) {
    spdlog::warn("{}", msg);
    out.warnings.push_back(std::move(msg));
  };

  std::vector<DatastoreEntry> abstracts;
  std::vector<DatastoreEntry> chunks;
  for (const auto& pub : corpus) {
    const std::size_t len = unicode::length(pub.abstract);
    if (len > options.abstract_size) {
      warn(fmt::format("abstract of '{}' has {} characters (> {}); stored whole", pub.pub_id, len,
                       options.abstract_size));
    }
    abstracts.push_back({make_entry_id(pub.pub_id, EntryKind::Abstract), pub.pub_id,
                         EntryKind::Abstract, 0, {}, pub.abstract});
    if (pub.full_text.empty()) {
      warn(fmt::format("'{}' has no full text; no chunks stored", pub.pub_id));
      continue;
    }
    for (auto& c : chunk_text(pub.full_text, options.chunk_size, options.chunk_overlap, pub.pub_id)) {
      const auto index = static_cast<std::uint32_t>(c.chunk_index);
      chunks.push_back({make_entry_id(pub.pub_id, EntryKind::Chunk, index), pub.pub_id,
                        EntryKind::Chunk, index, {}, std::move(c.text)});
    }
  }
  insert_all(out.abstracts, std::move(abstracts), embedder);
  insert_all(out.chunks, std::move(chunks), embedder);
  return out;
}

}  // namespace villa
