#include "villa/responder.hpp"

#include <cctype>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "villa/errors.hpp"

namespace villa {

ScriptedResponder::ScriptedResponder(Script script, std::string name)
    : script_(std::move(script)), name_(std::move(name)) {}

std::unique_ptr<ScriptedResponder> ScriptedResponder::constant(std::string response,
                                                               std::string name) {
  return std::make_unique<ScriptedResponder>(
      [response = std::move(response)](const ResponderRequest&) { return response; },
      std::move(name));
}

nlohmann::json ScriptedResponder::descriptor() const {
  return {{"backend", "mock"}, {"kind", "scripted"}, {"name", name_}};
}

std::string ScriptedResponder::respond(const ResponderRequest& request) const {
  ++calls_;
  return script_(request);
}

bool contains_token(std::string_view text, std::string_view token) {
  if (token.empty()) return false;
  auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  for (auto pos = text.find(token); pos != std::string_view::npos; pos = text.find(token, pos + 1)) {
    const bool left_ok = pos == 0 || !alnum(text[pos - 1]);
    const auto end = pos + token.size();
    const bool right_ok = end == text.size() || !alnum(text[end]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

OracleResponder::OracleResponder(GroundTruthDataset truth) : truth_(std::move(truth)) {}

std::string OracleResponder::respond(const ResponderRequest& request) const {
  ++calls_;
  nlohmann::json out = {{"mutations", nlohmann::json::array()}, {"reasoning", ""}};
  std::vector<std::string> found;
  if (request.context != nullptr) {
    const auto lookup = ground_truth_for_protein(truth_, request.protein);
    for (const auto& m : lookup.mutations) {
      const std::string key = normalize(m);
      if (contains_token(request.context->rendered, key)) found.push_back(key);
    }
  }
  for (const auto& key : found) out["mutations"].push_back(key);
  out["reasoning"] = found.empty()
                         ? std::string("No mutations of this protein appear in the context.")
                         : fmt::format("Context reports {}.", fmt::join(found, ", "));
  return out.dump();
}

RemoteResponder::RemoteResponder(RemoteResponderConfig config) : config_(std::move(config)) {
  if (config_.model.empty()) throw InvalidParameters("remote responder needs a model name");
  if (config_.endpoint.path.empty()) config_.endpoint.path = "/chat/completions";
}

nlohmann::json RemoteResponder::descriptor() const {
  nlohmann::json d = {{"backend", "remote"},
                      {"base_url", config_.endpoint.base_url},
                      {"model", config_.model},
                      {"temperature", config_.temperature}};
  if (config_.seed) d["seed"] = *config_.seed;
  return d;
}

std::string RemoteResponder::respond(const ResponderRequest& request) const {
  nlohmann::json messages = nlohmann::json::array();
  if (!config_.system_prompt.empty()) {
    messages.push_back({{"role", "system"}, {"content", config_.system_prompt}});
  }
  messages.push_back({{"role", "user"}, {"content", std::string(request.prompt)}});
  nlohmann::json body = {
      {"model", config_.model}, {"messages", messages}, {"temperature", config_.temperature}};
  if (config_.seed) body["seed"] = *config_.seed;

  const nlohmann::json response = post_json(config_.endpoint, body);
  try {
    return response.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ContractViolation(fmt::format("{}: chat response lacks choices[0].message.content: {}",
                                        config_.model, e.what()));
  }
}

}  // namespace villa
