#include "villa/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "villa/errors.hpp"
#include "villa/parallel.hpp"
#include "villa/unicode.hpp"

namespace villa {

std::string Embedder::prepare(std::string_view text) const {
  if (text.empty()) throw InvalidParameters("cannot embed empty text");
  if (max_input_chars_ > 0) {
    const std::size_t n = unicode::length(text);
    if (n > max_input_chars_) {
      spdlog::warn("{}: input of {} characters truncated to {}", name(), n, max_input_chars_);
      return unicode::substr(text, 0, max_input_chars_);
    }
  }
  return std::string(text);
}

void Embedder::check_vector(const EmbeddingVector& v) const {
  if (v.size() != dim()) {
    throw ContractViolation(
        fmt::format("{}: expected {} dimensions, backend returned {}", name(), dim(), v.size()));
  }
  for (float x : v) {
    if (!std::isfinite(x)) {
      throw ContractViolation(fmt::format("{}: backend returned a non-finite value", name()));
    }
  }
}

EmbeddingVector Embedder::embed(std::string_view text, EmbedRole role) const {
  auto v = embed_one(prepare(text), role);
  check_vector(v);
  return v;
}

BatchEmbedding Embedder::embed_batch(std::span<const std::string> texts, EmbedRole role) const {
  std::vector<std::string> prepared;
  prepared.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) {
      throw InvalidParameters(fmt::format("batch item {} is empty", i));
    }
    prepared.push_back(prepare(texts[i]));
  }
  if (prepared.empty()) return {};

  BatchEmbedding out = embed_many(prepared, role);
  out.vectors.resize(prepared.size());
  for (std::size_t i = 0; i < out.vectors.size(); ++i) {
    auto& v = out.vectors[i];
    if (v.empty()) continue;
    try {
      check_vector(v);
    } catch (const ContractViolation& e) {
      out.errors.push_back({i, e.what()});
      v.clear();
    }
  }
  std::sort(out.errors.begin(), out.errors.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  return out;
}

BatchEmbedding Embedder::embed_many(const std::vector<std::string>& texts, EmbedRole role) const {
  BatchEmbedding out;
  out.vectors.resize(texts.size());
  std::vector<std::string> item_errors(texts.size());
  parallel_for(texts.size(), parallelism_, [&](std::size_t i) {
    try {
      out.vectors[i] = embed_one(texts[i], role);
    } catch (const ContractViolation& e) {
      item_errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (!item_errors[i].empty()) out.errors.push_back({i, item_errors[i]});
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x80 || std::isalnum(u)) {
      current.push_back(static_cast<char>(std::tolower(u)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

MockEmbedder::MockEmbedder(std::uint64_t seed, std::size_t dim) : seed_(seed), dim_(dim) {
  if (dim < 2) throw InvalidParameters(fmt::format("mock embedder needs dim >= 2, got {}", dim));
}

std::string MockEmbedder::name() const { return fmt::format("mock-{}-{}", seed_, dim_); }

nlohmann::json MockEmbedder::descriptor() const {
  return {{"backend", "mock"}, {"seed", seed_}, {"dim", dim_}};
}

std::size_t MockEmbedder::bucket_of(std::string_view token) const {
  // FNV-1a over the token bytes, seeded through the offset basis.
  std::uint64_t h = 0xCBF29CE484222325ULL ^ splitmix64(seed_);
  for (char c : token) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return static_cast<std::size_t>(splitmix64(h) % dim_);
}

EmbeddingVector MockEmbedder::embed_one(std::string_view text, EmbedRole) const {
  std::vector<double> counts(dim_, 0.0);
  for (const auto& token : tokenize(text)) counts[bucket_of(token)] += 1.0;

  double norm2 = 0.0;
  for (double c : counts) norm2 += c * c;
  EmbeddingVector v(dim_, 0.0F);
  if (norm2 == 0.0) {
    v[0] = 1.0F;
    return v;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (std::size_t i = 0; i < dim_; ++i) v[i] = static_cast<float>(counts[i] * inv);
  return v;
}

std::unique_ptr<MockEmbedder> mock_embedder(std::uint64_t seed, std::size_t dim) {
  return std::make_unique<MockEmbedder>(seed, dim);
}

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderConfig config) : config_(std::move(config)) {
  if (config_.dim == 0) throw InvalidParameters("remote embedder needs a positive dim");
  if (config_.model.empty()) throw InvalidParameters("remote embedder needs a model name");
  if (config_.endpoint.path.empty()) config_.endpoint.path = "/embeddings";
  if (config_.batch_size == 0) config_.batch_size = 1;
}

nlohmann::json RemoteEmbedder::descriptor() const {
  nlohmann::json d = {{"backend", "remote"},
                      {"base_url", config_.endpoint.base_url},
                      {"model", config_.model},
                      {"dim", config_.dim}};
  if (!config_.query_model.empty()) d["query_model"] = config_.query_model;
  return d;
}

BatchEmbedding RemoteEmbedder::request(std::span<const std::string> texts, EmbedRole role) const {
  const std::string& model =
      (role == EmbedRole::Query && !config_.query_model.empty()) ? config_.query_model
                                                                 : config_.model;
  nlohmann::json body = {{"model", model}, {"input", nlohmann::json::array()}};
  for (const auto& t : texts) body["input"].push_back(t);

  const nlohmann::json response = post_json(config_.endpoint, body);

  BatchEmbedding out;
  out.vectors.resize(texts.size());
  std::vector<bool> seen(texts.size(), false);
  const auto data = response.find("data");
  if (data == response.end() || !data->is_array()) {
    for (std::size_t i = 0; i < texts.size(); ++i) {
      out.errors.push_back({i, "response has no 'data' array"});
    }
    return out;
  }
  for (std::size_t pos = 0; pos < data->size(); ++pos) {
    const auto& item = (*data)[pos];
    std::size_t index = pos;
    if (item.contains("index") && item["index"].is_number_integer()) {
      index = item["index"].get<std::size_t>();
    }
    if (index >= texts.size() || seen[index]) continue;
    seen[index] = true;
    const auto emb = item.find("embedding");
    if (emb == item.end() || !emb->is_array()) {
      out.errors.push_back({index, "item has no 'embedding' array"});
      continue;
    }
    EmbeddingVector v;
    v.reserve(emb->size());
    bool numeric = true;
    for (const auto& x : *emb) {
      if (!x.is_number()) {
        numeric = false;
        break;
      }
      v.push_back(x.get<float>());
    }
    if (!numeric) {
      out.errors.push_back({index, "embedding contains non-numeric values"});
      continue;
    }
    if (v.size() != config_.dim) {
      out.errors.push_back({index, fmt::format("{}: expected {} dimensions, backend returned {}",
                                               name(), config_.dim, v.size())});
      continue;
    }
    out.vectors[index] = std::move(v);
  }
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (!seen[i]) out.errors.push_back({i, "response is missing this item"});
  }
  return out;
}

EmbeddingVector RemoteEmbedder::embed_one(std::string_view text, EmbedRole role) const {
  const std::string item(text);
  auto result = request(std::span<const std::string>(&item, 1), role);
  if (!result.errors.empty()) throw ContractViolation(result.errors.front().message);
  return std::move(result.vectors.front());
}

BatchEmbedding RemoteEmbedder::embed_many(const std::vector<std::string>& texts,
                                          EmbedRole role) const {
  const std::size_t batches = (texts.size() + config_.batch_size - 1) / config_.batch_size;
  std::vector<BatchEmbedding> parts(batches);
  parallel_for(batches, parallelism(), [&](std::size_t b) {
    const std::size_t begin = b * config_.batch_size;
    const std::size_t count = std::min(config_.batch_size, texts.size() - begin);
    parts[b] = request(std::span<const std::string>(texts).subspan(begin, count), role);
  });

  BatchEmbedding out;
  out.vectors.reserve(texts.size());
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t begin = b * config_.batch_size;
    for (auto& v : parts[b].vectors) out.vectors.push_back(std::move(v));
    for (auto& e : parts[b].errors) out.errors.push_back({begin + e.index, std::move(e.message)});
  }
  return out;
}

}  // namespace villa
