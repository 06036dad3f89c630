#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "villa/review_store.hpp"

namespace httplib {
class Server;
}

namespace villa {

enum class Role { Evaluator, Admin };

struct Principal {
  std::string evaluator_id;
  Role role = Role::Evaluator;
};

/// Bearer token -> principal.
using TokenTable = std::map<std::string, Principal>;

/// {"tokens": [{"token": ..., "evaluator_id": ..., "role": "evaluator"|"admin"}]}
TokenTable load_tokens(const std::filesystem::path& path);
TokenTable tokens_from_json(const nlohmann::json& j);

/// REST front end over a ReviewStore:
///   GET  /health
///   GET  /items?virus=&protein=&status=&sort=&order=asc|desc&page=&page_size=
///   GET  /items/{id}
///   PUT  /items/{id}/evaluation
///   GET  /admin/export.csv
///   POST /admin/items          (body: run manifest)
class ReviewServer {
 public:
  ReviewServer(ReviewStore& store, TokenTable tokens);
  ~ReviewServer();

  /// Binds to an ephemeral port and returns it.
  int bind_any_port(const std::string& host = "127.0.0.1");
  bool bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  void register_routes();
  std::optional<Principal> authenticate(const std::string& authorization) const;

  ReviewStore& store_;
  TokenTable tokens_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace villa
