#pragma once

// Minimal OpenAI-compatible chat-completions client, shared by the LLM
// planner and the LLM critic. Thread-safe; one instance caps concurrency and
// request rate for everything that uses it.

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace plancritic::llm {

struct ClientConfig {
  /// e.g. "http://localhost:8000/v1"; "/chat/completions" is appended.
  std::string base_url = "http://localhost:8000/v1";
  std::string model;
  /// Environment variable holding the API key; unset or empty sends no key.
  std::string api_key_env = "OPENAI_API_KEY";
  int max_output_tokens = 2048;
  double timeout_seconds = 120;
  int max_retries = 3;
  int initial_backoff_ms = 1000;
  std::size_t max_concurrency = 8;
  /// Requests per second across the client; 0 means unlimited.
  double requests_per_second = 0;
  /// Append every request/response pair here as JSON lines when non-empty.
  std::string debug_log;
};

ClientConfig client_config_from_json(const nlohmann::json& json);
nlohmann::json to_json(const ClientConfig& config);

/// No usable response after all retries, or a non-retryable HTTP status.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A response arrived but is not a chat completion.
class MalformedResponse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ChatClient {
 public:
  explicit ChatClient(ClientConfig config);

  /// Single user message in, first choice's content out.
  std::string complete(const std::string& prompt, double temperature);

  const ClientConfig& config() const { return config_; }
  std::size_t requests_sent() const;

 private:
  void acquire();
  void release();
  void log(const nlohmann::json& entry);

  ClientConfig config_;
  std::string host_;
  std::string path_;
  std::string api_key_;

  mutable std::mutex mutex_;
  std::condition_variable slots_cv_;
  std::size_t in_flight_ = 0;
  std::size_t requests_sent_ = 0;
  std::chrono::steady_clock::time_point next_slot_{};

  std::mutex log_mutex_;
  std::ofstream log_;
};

}  // namespace plancritic::llm
