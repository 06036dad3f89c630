#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "villa/embedding.hpp"

namespace villa {

enum class EntryKind : std::uint8_t { Abstract = 0, Chunk = 1 };

std::string_view to_string(EntryKind kind);

struct DatastoreEntry {
  std::string entry_id;
  std::string pub_id;
  EntryKind kind = EntryKind::Chunk;
  std::uint32_t chunk_index = 0;
  EmbeddingVector vector;
  std::string text;

  bool operator==(const DatastoreEntry&) const = default;
};

/// `pub#a` for abstracts, `pub#c000012` for chunks; zero padding keeps
/// lexicographic order equal to chunk order.
std::string make_entry_id(std::string_view pub_id, EntryKind kind, std::uint32_t chunk_index = 0);

struct ScoredEntry {
  DatastoreEntry entry;
  double distance = 0.0;

  bool operator==(const ScoredEntry&) const = default;
};

/// 1 - a.b / (|a||b|), computed in double and clamped to [0, 2]. Throws
/// InvalidParameters on a dimension mismatch or a zero vector.
double cosine_distance(std::span<const float> a, std::span<const float> b);

struct RetrievalFilter {
  std::optional<std::string> pub_id;
};

/// Exact cosine top-k over a flat, contiguous vector table. Readers may run
/// concurrently; insert takes an exclusive lock.
class VectorStore {
 public:
  explicit VectorStore(std::size_t dim);
  VectorStore(VectorStore&&) noexcept = default;
  VectorStore& operator=(VectorStore&&) noexcept = default;

  std::size_t dim() const { return dim_; }
  std::size_t size() const;

  /// Upsert keyed by (pub_id, kind, chunk_index). Throws InvalidParameters
  /// on a dimension mismatch, a zero vector, or an entry_id already owned
  /// by a different key.
  void insert(DatastoreEntry entry);

  /// Entries within distance `threshold`, nearest first, ties by ascending
  /// entry_id, at most `k`.
  std::vector<ScoredEntry> top_k(std::span<const float> query, std::size_t k, double threshold,
                                 const RetrievalFilter& filter = {}) const;

  /// Distance from `query` to every entry, in storage order.
  std::vector<ScoredEntry> scan(std::span<const float> query) const;

  std::optional<DatastoreEntry> find(std::string_view entry_id) const;
  /// Storage (insertion) order.
  std::vector<DatastoreEntry> entries() const;
  std::vector<std::string> pub_ids() const;

  std::string serialize() const;
  static VectorStore deserialize(std::string_view bytes);

  /// Writes to a temporary file and renames it into place.
  void save(const std::filesystem::path& path) const;
  static VectorStore open(const std::filesystem::path& path);

 private:
  struct Key {
    std::string pub_id;
    EntryKind kind;
    std::uint32_t chunk_index;
    auto operator<=>(const Key&) const = default;
  };
  struct Row {
    std::string entry_id;
    std::string pub_id;
    EntryKind kind;
    std::uint32_t chunk_index;
    std::string text;
  };

  DatastoreEntry entry_at(std::size_t row) const;
  double distance_at(std::span<const float> query, double query_norm, std::size_t row) const;

  std::size_t dim_;
  std::vector<float> vectors_;  // row-major, dim_ floats per row
  std::vector<double> norms_;
  std::vector<Row> rows_;
  std::map<Key, std::size_t> by_key_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_pub_;
  std::unique_ptr<std::shared_mutex> mutex_ = std::make_unique<std::shared_mutex>();
};

}  // namespace villa
