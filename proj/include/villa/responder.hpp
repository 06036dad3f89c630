#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "villa/corpus.hpp"
#include "villa/http_client.hpp"
#include "villa/prompt.hpp"

namespace villa {

/// What a responder sees for one query. Remote backends use only `prompt`;
/// test doubles may inspect the structured fields.
struct ResponderRequest {
  std::string_view prompt;
  std::string_view virus;
  std::string_view protein;
  const Context* context = nullptr;  // null for zero-shot
};

/// Response generator. Implementations are safe to call concurrently.
class Responder {
 public:
  virtual ~Responder() = default;
  virtual std::string name() const = 0;
  virtual nlohmann::json descriptor() const = 0;
  /// Raw model output. Throws TransportError when the backend fails.
  virtual std::string respond(const ResponderRequest& request) const = 0;
};

/// Test double driven by a callback; counts calls.
class ScriptedResponder final : public Responder {
 public:
  using Script = std::function<std::string(const ResponderRequest&)>;

  explicit ScriptedResponder(Script script, std::string name = "scripted");
  /// Always answers `response`.
  static std::unique_ptr<ScriptedResponder> constant(std::string response,
                                                     std::string name = "constant");

  std::string name() const override { return name_; }
  nlohmann::json descriptor() const override;
  std::string respond(const ResponderRequest& request) const override;

  std::size_t calls() const { return calls_.load(); }

 private:
  Script script_;
  std::string name_;
  mutable std::atomic<std::size_t> calls_{0};
};

/// Emits exactly the ground-truth mutations of the requested protein that
/// occur verbatim (as whole tokens) in the context. Zero-shot requests get
/// an empty list.
class OracleResponder final : public Responder {
 public:
  explicit OracleResponder(GroundTruthDataset truth);

  std::string name() const override { return "oracle"; }
  nlohmann::json descriptor() const override { return {{"backend", "mock"}, {"kind", "oracle"}}; }
  std::string respond(const ResponderRequest& request) const override;

  std::size_t calls() const { return calls_.load(); }

 private:
  GroundTruthDataset truth_;
  mutable std::atomic<std::size_t> calls_{0};
};

/// True when `token` occurs in `text` with no alphanumeric neighbour on
/// either side.
bool contains_token(std::string_view text, std::string_view token);

struct RemoteResponderConfig {
  HttpEndpoint endpoint;  // path defaults to /chat/completions
  std::string model;
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
  std::string system_prompt;
};

/// Client for a chat endpoint:
///   POST {"model", "messages": [{"role", "content"}]} -> {"choices": [{"message": {"content"}}]}
class RemoteResponder final : public Responder {
 public:
  explicit RemoteResponder(RemoteResponderConfig config);

  std::string name() const override { return config_.model; }
  nlohmann::json descriptor() const override;
  std::string respond(const ResponderRequest& request) const override;

 private:
  RemoteResponderConfig config_;
};

}  // namespace villa
