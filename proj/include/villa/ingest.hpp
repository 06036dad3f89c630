#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "villa/corpus.hpp"
#include "villa/embedding.hpp"
#include "villa/vectorstore.hpp"

namespace villa {

struct StoreBuildOptions {
  std::size_t chunk_size = 1000;
  std::size_t chunk_overlap = 100;
  /// Abstracts are stored whole; longer ones only trigger a warning.
  std::size_t abstract_size = 5000;
};

struct BuiltStores {
  VectorStore abstracts;
  VectorStore chunks;
  std::vector<std::string> warnings;
};

/// One abstract entry per publication and one chunk entry per full-text
/// window. Throws ContractViolation if the embedder fails on any item.
BuiltStores build_stores(const Corpus& corpus, const Embedder& embedder,
                         const StoreBuildOptions& options = {});

}  // namespace villa
