#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "judgekit/errors.hpp"

namespace judgekit {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Connection parameters for a chat-completion endpoint. The API key is
/// normally taken from the environment; it is sent only in the auth header
/// and never written to logs, caches, or result files.
struct EndpointConfig {
  std::string base_url = "http://localhost:8000";
  std::string model_id;
  std::string api_key;
  std::chrono::milliseconds timeout{30000};
  std::size_t max_parallel = 4;
  std::size_t max_retries = 3;
  double temperature = 0.0;
  double requests_per_second = 0.0;  // 0 disables client-side rate limiting
  std::chrono::milliseconds retry_initial_delay{250};

  static constexpr const char* kApiKeyEnvVar = "JUDGEKIT_API_KEY";
};

/// Fills in the API key from the environment when the config has none.
inline EndpointConfig endpoint_from_env(EndpointConfig base = {}) {
  if (const char* key = std::getenv(EndpointConfig::kApiKeyEnvVar); key && base.api_key.empty()) {
    base.api_key = key;
  }
  return base;
}

inline void validate_endpoint(const EndpointConfig& cfg) {
  if (cfg.timeout.count() <= 0) throw OutOfRangeError("endpoint timeout must be positive");
  if (cfg.max_parallel < 1) throw OutOfRangeError("max_parallel must be at least 1");
  if (cfg.temperature < 0.0) throw OutOfRangeError("temperature must be non-negative");
}

/// One request/response round trip, including how many attempts it took.
struct CompletionExchange {
  std::string request_text;
  std::string response_text;
  std::chrono::milliseconds latency{0};
  std::size_t attempt_count = 0;
  std::string model_reported;
};

/// Per-prompt result slot for batch calls: either an exchange or an error.
struct CompletionResult {
  std::optional<CompletionExchange> exchange;
  std::optional<errc> error;
  std::string error_message;

  bool ok() const { return exchange.has_value(); }
};

// ---------------------------------------------------------------------------
// Client
// ---------------------------------------------------------------------------

/// Blocking client for the standard chat-completion JSON protocol
/// (POST /v1/chat/completions, bearer auth). A single instance may be shared
/// across threads; batch parallelism is managed internally and never exceeds
/// max_parallel.
class ChatClient {
public:
  explicit ChatClient(EndpointConfig cfg) : cfg_(std::move(cfg)) { validate_endpoint(cfg_); }

  const EndpointConfig& config() const { return cfg_; }

  /// Request body for a prompt; deterministic given (config, prompt).
  nlohmann::json request_body(const std::string& prompt) const {
    nlohmann::json body;
    body["model"] = cfg_.model_id;
    body["temperature"] = cfg_.temperature;
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
    return body;
  }

  /// Sends one prompt. Transient failures (timeouts, 429, 5xx) are retried
  /// with exponential backoff up to max_retries; auth and client errors fail
  /// immediately.
  CompletionExchange complete(const std::string& prompt) {
    const auto started = std::chrono::steady_clock::now();
    const std::string body = request_body(prompt).dump();

    httplib::Client http(cfg_.base_url);
    http.set_connection_timeout(cfg_.timeout);
    http.set_read_timeout(cfg_.timeout);
    http.set_write_timeout(cfg_.timeout);

    std::chrono::milliseconds delay = cfg_.retry_initial_delay;
    std::string last_failure;
    for (std::size_t attempt = 1; attempt <= cfg_.max_retries + 1; ++attempt) {
      throttle();
      httplib::Headers headers;
      if (!cfg_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + cfg_.api_key);
      }
      auto res = http.Post("/v1/chat/completions", headers, body, "application/json");

      if (!res) {
        last_failure = "transport error: " + httplib::to_string(res.error());
        if (attempt <= cfg_.max_retries) {
          sleep_backoff(delay);
          continue;
        }
        throw TimeoutError("request failed after " + std::to_string(attempt) +
                           " attempts: " + last_failure);
      }

      if (res->status == 401 || res->status == 403) {
        throw AuthError("endpoint rejected credentials (HTTP " + std::to_string(res->status) +
                        ")");
      }
      if (res->status == 429 || res->status >= 500) {
        last_failure = "HTTP " + std::to_string(res->status);
        if (attempt <= cfg_.max_retries) {
          sleep_backoff(delay, retry_after(*res));
          continue;
        }
        if (res->status == 429) {
          throw RateLimitExhaustedError("still rate limited after " + std::to_string(attempt) +
                                        " attempts");
        }
        throw EndpointError("endpoint failed after " + std::to_string(attempt) +
                            " attempts: " + last_failure);
      }
      if (res->status != 200) {
        throw EndpointError("unexpected HTTP " + std::to_string(res->status));
      }

      CompletionExchange exchange;
      exchange.request_text = prompt;
      exchange.attempt_count = attempt;
      extract_message(res->body, exchange);
      exchange.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - started);
      return exchange;
    }
    throw EndpointError("unreachable retry state");  // loop always returns or throws
  }

  /// Sends many prompts with at most max_parallel in flight. Result order
  /// matches input order; per-prompt failures are carried in the result
  /// slots, never thrown.
  std::vector<CompletionResult> complete_batch(const std::vector<std::string>& prompts) {
    std::vector<CompletionResult> results(prompts.size());
    if (prompts.empty()) return results;
    const std::size_t n_workers = std::min(cfg_.max_parallel, prompts.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= prompts.size()) return;
        try {
          results[i].exchange = complete(prompts[i]);
        } catch (const Error& e) {
          results[i].error = e.code();
          results[i].error_message = e.what();
        }
      }
    };
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (std::size_t t = 0; t < n_workers; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    return results;
  }

private:
  static std::optional<std::chrono::milliseconds> retry_after(const httplib::Response& res) {
    if (!res.has_header("Retry-After")) return std::nullopt;
    const std::string value = res.get_header_value("Retry-After");
    char* end = nullptr;
    const double seconds = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || seconds < 0.0) return std::nullopt;
    return std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
  }

  void sleep_backoff(std::chrono::milliseconds& delay,
                     std::optional<std::chrono::milliseconds> server_hint = std::nullopt) {
    const auto wait = server_hint ? std::max(*server_hint, delay) : delay;
    std::this_thread::sleep_for(wait);
    delay = std::min(delay * 2, std::chrono::milliseconds(10000));  // non-decreasing
  }

  void extract_message(const std::string& body, CompletionExchange& exchange) const {
    const auto json = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (json.is_discarded()) {
      throw MalformedResponseError("response body is not JSON");
    }
    const auto choices = json.find("choices");
    if (choices == json.end() || !choices->is_array() || choices->empty()) {
      throw MalformedResponseError("response has no choices");
    }
    const auto& first = (*choices)[0];
    if (!first.contains("message") || !first["message"].contains("content") ||
        !first["message"]["content"].is_string()) {
      throw MalformedResponseError("response choice has no message content");
    }
    exchange.response_text = first["message"]["content"].get<std::string>();
    if (json.contains("model") && json["model"].is_string()) {
      exchange.model_reported = json["model"].get<std::string>();
    }
  }

  // Token bucket on request starts. Disabled when requests_per_second is 0.
  void throttle() {
    if (cfg_.requests_per_second <= 0.0) return;
    std::unique_lock lock(limiter_mutex_);
    const auto now = std::chrono::steady_clock::now();
    const double capacity = std::max(1.0, cfg_.requests_per_second);
    if (last_refill_.time_since_epoch().count() != 0) {
      const double elapsed = std::chrono::duration<double>(now - last_refill_).count();
      tokens_ = std::min(capacity, tokens_ + elapsed * cfg_.requests_per_second);
    } else {
      tokens_ = capacity;
    }
    last_refill_ = now;
    if (tokens_ < 1.0) {
      const double deficit = (1.0 - tokens_) / cfg_.requests_per_second;
      lock.unlock();
      std::this_thread::sleep_for(std::chrono::duration<double>(deficit));
      lock.lock();
      tokens_ = 1.0;
      last_refill_ = std::chrono::steady_clock::now();
    }
    tokens_ -= 1.0;
  }

  EndpointConfig cfg_;
  std::mutex limiter_mutex_;
  double tokens_ = 0.0;
  std::chrono::steady_clock::time_point last_refill_{};
};

}  // namespace judgekit
