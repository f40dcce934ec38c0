#pragma once

#include <atomic>
#include <functional>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "plancritic/llm_client.hpp"

namespace plancritic::testing {

// Local chat-completions endpoint answering from a script.
class FakeServer {
 public:
  explicit FakeServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/chat/completions", [this, handler](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      handler(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

  std::atomic<int> hits{0};

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

inline std::string completion(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

inline llm::ClientConfig fast_config(const std::string& base_url) {
  llm::ClientConfig c;
  c.base_url = base_url;
  c.model = "test-model";
  c.api_key_env = "PLANCRITIC_TEST_KEY_UNSET";
  c.initial_backoff_ms = 1;
  c.timeout_seconds = 5;
  return c;
}

}  // namespace plancritic::testing
