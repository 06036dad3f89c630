#pragma once

#include <chrono>
#include <string>

#include <json.hpp>

namespace villa {

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{250};
  double backoff_factor = 2.0;
};

/// JSON-over-HTTP endpoint. `base_url` is scheme://host[:port][/prefix];
/// `path` is appended to the prefix.
struct HttpEndpoint {
  std::string base_url;
  std::string path;
  std::string api_key;  // sent as a bearer token when non-empty
  std::chrono::seconds timeout{120};
  RetryPolicy retry;
};

/// POSTs `body` and returns the decoded JSON response. Retries on
/// connection failures, 429 and 5xx with exponential backoff; any other
/// non-2xx status fails immediately. Throws TransportError carrying the
/// last status, or ContractViolation if the body is not JSON.
nlohmann::json post_json(const HttpEndpoint& endpoint, const nlohmann::json& body);

/// Reads an environment variable, returning `fallback` when unset or empty.
std::string env_or(const char* name, const std::string& fallback = {});

}  // namespace villa
