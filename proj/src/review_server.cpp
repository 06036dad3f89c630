#include "villa/review_server.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <httplib.h>

namespace villa {
namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message,
                const std::string& field = {}) {
  json body = {{"error", message}};
  if (!field.empty()) body["field"] = field;
  send_json(res, status, body);
}

json item_view_json(const ReviewItem& item, std::optional<ReviewStatus> status) {
  json j = {{"item_id", item.item_id},
            {"virus", item.virus},
            {"protein", item.protein},
            {"mutations", item.mutations},
            {"reasoning", item.reasoning}};
  if (status) j["status"] = std::string(to_string(*status));
  return j;
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  auto v = req.get_param_value(name);
  if (v.empty()) return std::nullopt;
  return v;
}

std::size_t size_param(const httplib::Request& req, const char* name, std::size_t fallback) {
  const auto v = param(req, name);
  if (!v) return fallback;
  try {
    const long long n = std::stoll(*v);
    if (n < 1) throw std::out_of_range(*v);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw ValidationError(fmt::format("{} must be a positive integer", name), name);
  }
}

}  // namespace

TokenTable tokens_from_json(const json& j) {
  TokenTable table;
  for (const auto& t : j.at("tokens")) {
    Principal p;
    p.evaluator_id = t.at("evaluator_id").get<std::string>();
    const auto role = t.value("role", "evaluator");
    if (role == "admin") {
      p.role = Role::Admin;
    } else if (role == "evaluator") {
      p.role = Role::Evaluator;
    } else {
      throw InvalidParameters(fmt::format("unknown role '{}'", role));
    }
    table[t.at("token").get<std::string>()] = p;
  }
  return table;
}

TokenTable load_tokens(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open token file '{}'", path.string()));
  try {
    return tokens_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("token file '{}': {}", path.string(), e.what()));
  }
}

ReviewServer::ReviewServer(ReviewStore& store, TokenTable tokens)
    : store_(store), tokens_(std::move(tokens)), server_(std::make_unique<httplib::Server>()) {
  register_routes();
}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::bind_any_port(const std::string& host) {
  return server_->bind_to_any_port(host);
}

bool ReviewServer::bind(const std::string& host, int port) {
  return server_->bind_to_port(host, port);
}

bool ReviewServer::listen_after_bind() { return server_->listen_after_bind(); }

void ReviewServer::stop() {
  if (server_) server_->stop();
}

void ReviewServer::wait_until_ready() const { server_->wait_until_ready(); }

std::optional<Principal> ReviewServer::authenticate(const std::string& authorization) const {
  constexpr std::string_view kBearer = "Bearer ";
  if (authorization.rfind(kBearer, 0) != 0) return std::nullopt;
  const auto it = tokens_.find(authorization.substr(kBearer.size()));
  if (it == tokens_.end()) return std::nullopt;
  return it->second;
}

void ReviewServer::register_routes() {
  using Handler = std::function<void(const httplib::Request&, httplib::Response&, const Principal&)>;
  // Wraps a handler with authentication, optional admin check and error
  // mapping.
  auto guarded = [this](bool admin_only, Handler handler) {
    return [this, admin_only, handler](const httplib::Request& req, httplib::Response& res) {
      const auto who = authenticate(req.get_header_value("Authorization"));
      if (!who) return send_error(res, 401, "missing or invalid bearer token");
      if (admin_only && who->role != Role::Admin) {
        return send_error(res, 403, "admin role required");
      }
      try {
        handler(req, res, *who);
      } catch (const ValidationError& e) {
        send_error(res, 422, e.what(), e.field());
      } catch (const NotFound& e) {
        send_error(res, 404, e.what());
      } catch (const ParseError& e) {
        send_error(res, 400, e.what());
      } catch (const json::exception& e) {
        send_error(res, 400, e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, e.what());
      }
    };
  };

  server_->Get("/health", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}});
  });

  server_->Get("/items", guarded(false, [this](const auto& req, auto& res, const Principal& who) {
    ItemQuery q;
    q.virus = param(req, "virus");
    q.protein = param(req, "protein");
    if (const auto status = param(req, "status")) {
      if (*status == "pending") {
        q.status = ReviewStatus::Pending;
      } else if (*status == "completed") {
        q.status = ReviewStatus::Completed;
      } else {
        throw ValidationError("status must be pending or completed", "status");
      }
    }
    q.sort = param(req, "sort").value_or("item_id");
    const auto order = param(req, "order").value_or("asc");
    if (order != "asc" && order != "desc") {
      throw ValidationError("order must be asc or desc", "order");
    }
    q.descending = order == "desc";
    q.page = size_param(req, "page", 1);
    q.page_size = size_param(req, "page_size", 50);

    const auto page = store_.list_items(who.evaluator_id, q);
    json items = json::array();
    for (const auto& v : page.items) items.push_back(item_view_json(v.item, v.status));
    send_json(res, 200, {{"items", items}, {"total", page.total}, {"page", q.page},
                         {"page_size", q.page_size}});
  }));

  server_->Get(R"(/items/([^/]+))", guarded(false, [this](const auto& req, auto& res,
                                                          const Principal& who) {
    const std::string id = req.matches[1];
    const auto item = store_.item(id);
    if (!item) throw NotFound(fmt::format("no review item '{}'", id));
    const auto ev = store_.evaluation(id, who.evaluator_id);
    json body = item_view_json(*item, ev ? ReviewStatus::Completed : ReviewStatus::Pending);
    body["evaluation"] = ev ? to_json(*ev) : json(nullptr);
    send_json(res, 200, body);
  }));

  server_->Put(R"(/items/([^/]+)/evaluation)", guarded(false, [this](const auto& req, auto& res,
                                                                     const Principal& who) {
    const json body = json::parse(req.body);
    RubricEvaluation ev;
    ev.item_id = req.matches[1];
    ev.evaluator_id = who.evaluator_id;
    if (!body.contains("scores") || !body["scores"].is_object()) {
      throw ValidationError("body needs a 'scores' object", "scores");
    }
    for (const auto& [category, value] : body["scores"].items()) {
      if (!value.is_number_integer()) {
        throw ValidationError(fmt::format("score for '{}' must be an integer", category), category);
      }
      ev.scores[category] = value.template get<int>();
    }
    if (body.contains("comment") && !body["comment"].is_null()) {
      ev.comment = body["comment"].template get<std::string>();
    }
    // Existence check first so an unknown item is 404 even with bad scores.
    if (!store_.item(ev.item_id)) throw NotFound(fmt::format("no review item '{}'", ev.item_id));
    const auto id = store_.submit(std::move(ev));
    send_json(res, 200, {{"id", id}, {"status", "completed"}});
  }));

  server_->Get("/admin/export.csv", guarded(true, [this](const auto&, auto& res, const Principal&) {
    std::ostringstream out;
    store_.export_csv(out);
    res.status = 200;
    res.set_content(out.str(), "text/csv");
  }));

  server_->Post("/admin/items", guarded(true, [this](const auto& req, auto& res, const Principal&) {
    const auto manifest = manifest_from_json(json::parse(req.body));
    const auto ids = store_.ingest(manifest);
    send_json(res, 201, {{"item_ids", ids}});
  }));
}

}  // namespace villa
