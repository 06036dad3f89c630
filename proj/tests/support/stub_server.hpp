#pragma once

#include <atomic>
#include <functional>
#include <string>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

namespace villa::testing {

/// Local HTTP server on an ephemeral port; handlers are set before start().
class StubServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit StubServer(const std::string& path, Handler handler) {
    server_.Post(path, [this, handler](const httplib::Request& req, httplib::Response& res) {
      ++hits_;
      handler(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  std::string base_url() const { return fmt::format("http://127.0.0.1:{}", port_); }
  int hits() const { return hits_.load(); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::atomic<int> hits_{0};
  std::thread thread_;
};

}  // namespace villa::testing
