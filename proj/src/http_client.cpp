#include "villa/http_client.hpp"

#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "villa/errors.hpp"

namespace villa {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host:port
  std::string prefix;  // path prefix without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InvalidParameters(fmt::format("base URL '{}' has no scheme", url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) out.prefix = url.substr(path_start);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

bool retryable(int status) { return status == 429 || (status >= 500 && status < 600); }

}  // namespace

nlohmann::json post_json(const HttpEndpoint& endpoint, const nlohmann::json& body) {
  const auto url = split_url(endpoint.base_url);
  std::string path = url.prefix;
  if (!endpoint.path.empty() && endpoint.path.front() != '/') path.push_back('/');
  path += endpoint.path;
  if (path.empty()) path = "/";

  httplib::Client client(url.origin);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(endpoint.timeout);
  client.set_write_timeout(endpoint.timeout);
  httplib::Headers headers;
  if (!endpoint.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint.api_key);
  }
  const std::string payload = body.dump();

  auto backoff = endpoint.retry.initial_backoff;
  int last_status = 0;
  std::string last_error;
  for (int attempt = 0; attempt <= endpoint.retry.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(
          static_cast<long long>(static_cast<double>(backoff.count()) * endpoint.retry.backoff_factor));
    }
    auto res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      last_status = 0;
      last_error = httplib::to_string(res.error());
      spdlog::warn("POST {}{}: {} (attempt {})", url.origin, path, last_error, attempt + 1);
      continue;
    }
    last_status = res->status;
    if (res->status >= 200 && res->status < 300) {
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error& e) {
        throw ContractViolation(fmt::format("POST {}{}: response is not JSON: {}", url.origin,
                                            path, e.what()));
      }
    }
    last_error = fmt::format("HTTP {}", res->status);
    if (!retryable(res->status)) break;
    spdlog::warn("POST {}{}: {} (attempt {})", url.origin, path, last_error, attempt + 1);
  }
  throw TransportError(fmt::format("POST {}{} failed: {}", url.origin, path, last_error),
                       last_status);
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* value = std::getenv(name);
  return (value && *value) ? std::string(value) : fallback;
}

}  // namespace villa
