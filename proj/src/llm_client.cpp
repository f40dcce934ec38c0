#include "plancritic/llm_client.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

#include "httplib.h"

namespace plancritic::llm {

ClientConfig client_config_from_json(const nlohmann::json& json) {
  ClientConfig c;
  c.base_url = json.value("base_url", c.base_url);
  c.model = json.value("model", c.model);
  c.api_key_env = json.value("api_key_env", c.api_key_env);
  c.max_output_tokens = json.value("max_output_tokens", c.max_output_tokens);
  c.timeout_seconds = json.value("timeout_seconds", c.timeout_seconds);
  c.max_retries = json.value("max_retries", c.max_retries);
  c.initial_backoff_ms = json.value("initial_backoff_ms", c.initial_backoff_ms);
  c.max_concurrency = json.value("max_concurrency", c.max_concurrency);
  c.requests_per_second = json.value("requests_per_second", c.requests_per_second);
  c.debug_log = json.value("debug_log", c.debug_log);
  if (c.max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
  if (c.max_concurrency == 0) throw std::invalid_argument("max_concurrency must be >= 1");
  if (c.requests_per_second < 0) throw std::invalid_argument("requests_per_second must be >= 0");
  return c;
}

nlohmann::json to_json(const ClientConfig& c) {
  return {{"base_url", c.base_url},
          {"model", c.model},
          {"api_key_env", c.api_key_env},
          {"max_output_tokens", c.max_output_tokens},
          {"timeout_seconds", c.timeout_seconds},
          {"max_retries", c.max_retries},
          {"initial_backoff_ms", c.initial_backoff_ms},
          {"max_concurrency", c.max_concurrency},
          {"requests_per_second", c.requests_per_second},
          {"debug_log", c.debug_log}};
}

ChatClient::ChatClient(ClientConfig config) : config_(std::move(config)) {
  auto scheme = config_.base_url.find("://");
  if (scheme == std::string::npos) throw std::invalid_argument("base_url needs a scheme: " + config_.base_url);
  auto slash = config_.base_url.find('/', scheme + 3);
  host_ = config_.base_url.substr(0, slash);
  path_ = slash == std::string::npos ? std::string() : config_.base_url.substr(slash);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/chat/completions";
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (host_.rfind("https://", 0) == 0) throw std::invalid_argument("built without TLS support: " + host_);
#endif
  if (!config_.api_key_env.empty())
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
  if (!config_.debug_log.empty()) {
    log_.open(config_.debug_log, std::ios::app);
    if (!log_) throw std::runtime_error("cannot open debug log " + config_.debug_log);
  }
}

std::size_t ChatClient::requests_sent() const {
  std::lock_guard lock(mutex_);
  return requests_sent_;
}

void ChatClient::acquire() {
  std::unique_lock lock(mutex_);
  slots_cv_.wait(lock, [&] { return in_flight_ < config_.max_concurrency; });
  ++in_flight_;
  if (config_.requests_per_second > 0) {
    auto now = std::chrono::steady_clock::now();
    auto start = std::max(now, next_slot_);
    next_slot_ = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                             std::chrono::duration<double>(1.0 / config_.requests_per_second));
    lock.unlock();
    std::this_thread::sleep_until(start);
  }
}

void ChatClient::release() {
  {
    std::lock_guard lock(mutex_);
    --in_flight_;
  }
  slots_cv_.notify_one();
}

void ChatClient::log(const nlohmann::json& entry) {
  if (!log_.is_open()) return;
  std::lock_guard lock(log_mutex_);
  log_ << entry.dump() << '\n';
  log_.flush();
}

std::string ChatClient::complete(const std::string& prompt, double temperature) {
  nlohmann::json request{{"model", config_.model},
                         {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
                         {"temperature", temperature},
                         {"max_tokens", config_.max_output_tokens}};
  const std::string body = request.dump();
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(
          static_cast<long long>(config_.initial_backoff_ms * std::pow(2.0, attempt - 1))));

    httplib::Client client(host_);
    auto seconds = static_cast<time_t>(config_.timeout_seconds);
    auto usec = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(seconds)) * 1e6);
    client.set_connection_timeout(seconds, usec);
    client.set_read_timeout(seconds, usec);
    client.set_write_timeout(seconds, usec);

    acquire();
    httplib::Result result = client.Post(path_, headers, body, "application/json");
    release();
    {
      std::lock_guard lock(mutex_);
      ++requests_sent_;
    }

    if (!result) {
      last_error = "request failed: " + httplib::to_string(result.error());
      log({{"attempt", attempt}, {"request", request}, {"error", last_error}});
      continue;
    }
    log({{"attempt", attempt}, {"request", request}, {"status", result->status}, {"response", result->body}});
    if (result->status == 429 || result->status >= 500) {
      last_error = "HTTP " + std::to_string(result->status);
      continue;
    }
    if (result->status != 200)
      throw TransportError("HTTP " + std::to_string(result->status) + ": " + result->body.substr(0, 200));

    nlohmann::json response = nlohmann::json::parse(result->body, nullptr, false);
    if (response.is_discarded()) throw MalformedResponse("response body is not JSON");
    try {
      const auto& content = response.at("choices").at(0).at("message").at("content");
      if (!content.is_string()) throw MalformedResponse("message content is not a string");
      return content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw MalformedResponse(std::string("unexpected response shape: ") + e.what());
    }
  }
  throw TransportError("giving up after " + std::to_string(config_.max_retries + 1) + " attempts: " + last_error);
}

}  // namespace plancritic::llm
