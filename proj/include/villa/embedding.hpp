#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "villa/http_client.hpp"

namespace villa {

using EmbeddingVector = std::vector<float>;

/// Some embedders encode queries and documents with different models.
enum class EmbedRole { Query, Document };

struct BatchItemError {
  std::size_t index = 0;
  std::string message;
};

/// Result of embed_batch. `vectors[i]` is empty when item i failed; its
/// failure is listed in `errors`.
struct BatchEmbedding {
  std::vector<EmbeddingVector> vectors;
  std::vector<BatchItemError> errors;

  bool ok() const { return errors.empty(); }
};

/// Maps text to a fixed-length vector. Implementations are immutable after
/// construction and safe to share between threads.
class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  /// Configuration echoed into run manifests. Never contains secrets.
  virtual nlohmann::json descriptor() const = 0;

  /// Input longer than max_input_chars() is truncated with a warning.
  EmbeddingVector embed(std::string_view text, EmbedRole role = EmbedRole::Document) const;

  /// Output order matches input order. Item failures are reported per item;
  /// only transport-level failures throw.
  BatchEmbedding embed_batch(std::span<const std::string> texts,
                             EmbedRole role = EmbedRole::Document) const;

  /// 0 means unlimited.
  std::size_t max_input_chars() const { return max_input_chars_; }
  void set_max_input_chars(std::size_t n) { max_input_chars_ = n; }

  std::size_t parallelism() const { return parallelism_; }
  void set_parallelism(std::size_t n) { parallelism_ = n == 0 ? 1 : n; }

 protected:
  virtual EmbeddingVector embed_one(std::string_view text, EmbedRole role) const = 0;
  /// Default: embed_one per item, spread over parallelism() threads.
  virtual BatchEmbedding embed_many(const std::vector<std::string>& texts, EmbedRole role) const;

  /// Throws ContractViolation on wrong length or non-finite values.
  void check_vector(const EmbeddingVector& v) const;

 private:
  std::string prepare(std::string_view text) const;

  std::size_t max_input_chars_ = 0;
  std::size_t parallelism_ = 1;
};

/// Lowercased runs of alphanumeric characters. Bytes >= 0x80 count as
/// alphanumeric so non-ASCII words stay intact.
std::vector<std::string> tokenize(std::string_view text);

/// Offline embedder: seeded hashed bag of tokens, L2-normalized. A text
/// with no tokens maps to the first basis vector.
class MockEmbedder final : public Embedder {
 public:
  MockEmbedder(std::uint64_t seed, std::size_t dim);

  std::string name() const override;
  std::size_t dim() const override { return dim_; }
  nlohmann::json descriptor() const override;

  std::uint64_t seed() const { return seed_; }
  /// Bucket a (lowercased) token hashes to.
  std::size_t bucket_of(std::string_view token) const;

 protected:
  EmbeddingVector embed_one(std::string_view text, EmbedRole role) const override;

 private:
  std::uint64_t seed_;
  std::size_t dim_;
};

std::unique_ptr<MockEmbedder> mock_embedder(std::uint64_t seed, std::size_t dim);

struct RemoteEmbedderConfig {
  HttpEndpoint endpoint;  // path defaults to /embeddings
  std::string model;
  std::string query_model;  // used for EmbedRole::Query when non-empty
  std::size_t dim = 0;
  std::size_t batch_size = 64;
};

/// Client for an embeddings endpoint:
///   POST {"model": m, "input": [texts]} -> {"data": [{"index": i, "embedding": [...]}]}
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(RemoteEmbedderConfig config);

  std::string name() const override { return config_.model; }
  std::size_t dim() const override { return config_.dim; }
  nlohmann::json descriptor() const override;

 protected:
  EmbeddingVector embed_one(std::string_view text, EmbedRole role) const override;
  BatchEmbedding embed_many(const std::vector<std::string>& texts, EmbedRole role) const override;

 private:
  BatchEmbedding request(std::span<const std::string> texts, EmbedRole role) const;

  RemoteEmbedderConfig config_;
};

}  // namespace villa
