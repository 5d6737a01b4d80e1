#include <catch2/catch.hpp>

#include <atomic>
#include <chrono>
#include <thread>

#include "judgekit/cache.hpp"
#include "judgekit/client.hpp"
#include "judgekit/judge_runner.hpp"
#include "mock_server.hpp"
#include "temp_dir.hpp"

using namespace judgekit;
using mock::MockServer;

namespace {

EndpointConfig test_config(const MockServer& server) {
  EndpointConfig cfg;
  cfg.base_url = server.base_url();
  cfg.model_id = "mock-model";
  cfg.api_key = "sk-test-secret-xyz";
  cfg.timeout = std::chrono::milliseconds(5000);
  cfg.max_parallel = 4;
  cfg.max_retries = 3;
  cfg.retry_initial_delay = std::chrono::milliseconds(1);
  return cfg;
}

}  // namespace

TEST_CASE("request bodies are deterministic and minimal", "[client]") {
  EndpointConfig cfg;
  cfg.model_id = "m";
  cfg.temperature = 0.0;
  ChatClient client(cfg);
  const auto body = client.request_body("hello");
  CHECK(body.dump() == client.request_body("hello").dump());
  CHECK(body.size() == 3);  // model, temperature, messages; no tool fields
  CHECK(body["model"] == "m");
  CHECK(body["temperature"] == 0.0);
  CHECK(body["messages"][0]["role"] == "user");
  CHECK(body["messages"][0]["content"] == "hello");
}

TEST_CASE("endpoint config validation", "[client]") {
  EndpointConfig cfg;
  cfg.max_parallel = 0;
  CHECK_THROWS_AS(ChatClient(cfg), OutOfRangeError);
  cfg = EndpointConfig{};
  cfg.temperature = -0.5;
  CHECK_THROWS_AS(ChatClient(cfg), OutOfRangeError);
  cfg = EndpointConfig{};
  cfg.timeout = std::chrono::milliseconds(0);
  CHECK_THROWS_AS(ChatClient(cfg), OutOfRangeError);
}

TEST_CASE("client happy path", "[client]") {
  MockServer server;
  server.set_handler([](const httplib::Request& req, httplib::Response& res) {
    CHECK(req.get_header_value("Authorization") == "Bearer sk-test-secret-xyz");
    MockServer::reply_text(res, "2");
  });
  ChatClient client(test_config(server));
  const CompletionExchange exchange = client.complete("rate this");
  CHECK(exchange.response_text == "2");
  CHECK(exchange.attempt_count == 1);
  CHECK(exchange.model_reported == "mock-model");
  CHECK(server.total_calls() == 1);
}

TEST_CASE("transient failures are retried", "[client]") {
  MockServer server;
  std::atomic<int> calls{0};
  server.set_handler([&](const httplib::Request&, httplib::Response& res) {
    if (++calls <= 2) {
      res.status = 429;
      return;
    }
    MockServer::reply_text(res, "4");
  });
  ChatClient client(test_config(server));
  const CompletionExchange exchange = client.complete("p");
  CHECK(exchange.attempt_count == 3);
  CHECK(exchange.response_text == "4");
}

TEST_CASE("auth failures are not retried", "[client]") {
  MockServer server;
  server.set_handler([](const httplib::Request&, httplib::Response& res) { res.status = 401; });
  ChatClient client(test_config(server));
  CHECK_THROWS_AS(client.complete("p"), AuthError);
  CHECK(server.total_calls() == 1);
}

TEST_CASE("persistent server errors exhaust retries", "[client]") {
  MockServer server;
  server.set_handler([](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  EndpointConfig cfg = test_config(server);
  cfg.max_retries = 2;
  ChatClient client(cfg);
  CHECK_THROWS_AS(client.complete("p"), EndpointError);
  CHECK(server.total_calls() == 3);  // initial try + 2 retries

  server.reset_counters();
  server.set_handler([](const httplib::Request&, httplib::Response& res) { res.status = 429; });
  CHECK_THROWS_AS(client.complete("p"), RateLimitExhaustedError);
  CHECK(server.total_calls() == 3);
}

TEST_CASE("slow responses time out", "[client]") {
  MockServer server;
  server.set_handler([](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(400));
    MockServer::reply_text(res, "4");
  });
  EndpointConfig cfg = test_config(server);
  cfg.timeout = std::chrono::milliseconds(100);
  cfg.max_retries = 0;
  ChatClient client(cfg);
  CHECK_THROWS_AS(client.complete("p"), TimeoutError);
}

TEST_CASE("malformed bodies are rejected", "[client]") {
  MockServer server;
  SECTION("not json") {
    server.set_handler([](const httplib::Request&, httplib::Response& res) {
      res.set_content("not json", "text/plain");
    });
  }
  SECTION("missing choices") {
    server.set_handler([](const httplib::Request&, httplib::Response& res) {
      res.set_content("{\"model\": \"m\"}", "application/json");
    });
  }
  SECTION("choice without content") {
    server.set_handler([](const httplib::Request&, httplib::Response& res) {
      res.set_content("{\"choices\": [{\"message\": {}}]}", "application/json");
    });
  }
  ChatClient client(test_config(server));
  CHECK_THROWS_AS(client.complete("p"), MalformedResponseError);
}

TEST_CASE("the token bucket paces request starts", "[client]") {
  MockServer server;
  ChatClient slow([&] {
    EndpointConfig cfg = test_config(server);
    cfg.requests_per_second = 50.0;  // one token per 20ms once the bucket drains
    cfg.max_parallel = 1;
    return cfg;
  }());
  const auto started = std::chrono::steady_clock::now();
  // burst capacity covers the first requests; the tail is paced
  const auto results = slow.complete_batch(std::vector<std::string>(55, "p"));
  const auto elapsed = std::chrono::steady_clock::now() - started;
  for (const auto& r : results) REQUIRE(r.ok());
  CHECK(elapsed >= std::chrono::milliseconds(80));
}

TEST_CASE("backoff delays accumulate", "[client]") {
  MockServer server;
  std::atomic<int> calls{0};
  server.set_handler([&](const httplib::Request&, httplib::Response& res) {
    if (++calls <= 2) {
      res.status = 503;
      return;
    }
    MockServer::reply_text(res, "0");
  });
  EndpointConfig cfg = test_config(server);
  cfg.retry_initial_delay = std::chrono::milliseconds(40);
  ChatClient client(cfg);
  const auto started = std::chrono::steady_clock::now();
  client.complete("p");
  const auto elapsed = std::chrono::steady_clock::now() - started;
  // 40ms then 80ms of backoff before the third attempt
  CHECK(elapsed >= std::chrono::milliseconds(120));
}

TEST_CASE("batch respects the parallelism bound and preserves order", "[client]") {
  MockServer server;
  server.set_handler([](const httplib::Request& req, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(25));
    const auto body = nlohmann::json::parse(req.body);
    MockServer::reply_text(res, body["messages"][0]["content"].get<std::string>());
  });
  ChatClient client(test_config(server));

  std::vector<std::string> prompts;
  for (int i = 0; i < 20; ++i) prompts.push_back("prompt-" + std::to_string(i));
  const auto results = client.complete_batch(prompts);

  REQUIRE(results.size() == 20);
  for (std::size_t i = 0; i < results.size(); ++i) {
    REQUIRE(results[i].ok());
    CHECK(results[i].exchange->response_text == prompts[i]);  // order by index
  }
  CHECK(server.high_water() <= 4);
  CHECK(server.high_water() >= 2);  // actually ran concurrently
  CHECK(server.total_calls() == 20);
}

TEST_CASE("batch carries per-item failures without aborting", "[client]") {
  MockServer server;
  server.set_handler([](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    const std::string prompt = body["messages"][0]["content"].get<std::string>();
    if (prompt.find("fail") != std::string::npos) {
      res.status = 400;
      return;
    }
    MockServer::reply_text(res, "ok:" + prompt);
  });
  ChatClient client(test_config(server));

  SECTION("all failing") {
    const std::vector<std::string> prompts(20, "fail");
    const auto results = client.complete_batch(prompts);
    REQUIRE(results.size() == 20);
    for (const auto& r : results) {
      CHECK_FALSE(r.ok());
      CHECK(r.error.has_value());
    }
  }

  SECTION("mixed success and failure keeps indexing") {
    std::vector<std::string> prompts;
    for (int i = 0; i < 10; ++i) {
      prompts.push_back(i % 3 == 0 ? "fail-" + std::to_string(i) : "good-" + std::to_string(i));
    }
    const auto results = client.complete_batch(prompts);
    for (std::size_t i = 0; i < prompts.size(); ++i) {
      if (prompts[i].find("fail") != std::string::npos) {
        CHECK_FALSE(results[i].ok());
      } else {
        REQUIRE(results[i].ok());
        CHECK(results[i].exchange->response_text == "ok:" + prompts[i]);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// judge_dataset over the mock endpoint
// ---------------------------------------------------------------------------

namespace {

std::vector<JudgeTask> sample_tasks(int n) {
  std::vector<JudgeTask> tasks;
  for (int i = 0; i < n; ++i) {
    tasks.push_back(JudgeTask{"item-" + std::to_string(i), "question " + std::to_string(i),
                              "reference " + std::to_string(i), "answer " + std::to_string(i)});
  }
  return tasks;
}

// The reversed prompt places the candidate answer before the reference.
bool is_reversed_prompt(const std::string& prompt) {
  return prompt.find("Candidate answer:") < prompt.find("Reference answer:");
}

}  // namespace

TEST_CASE("judge_dataset assembles verdicts from both prompts", "[client][judge_runner]") {
  MockServer server;
  server.set_handler([](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    const std::string prompt = body["messages"][0]["content"].get<std::string>();
    MockServer::reply_text(res, is_reversed_prompt(prompt) ? "2" : "4");
  });
  ChatClient client(test_config(server));
  testutil::TempDir tmp("judge_runner");
  VerdictCache cache(tmp.file("cache.jsonl"));

  const auto tasks = sample_tasks(5);
  const auto outcomes = judge_dataset(tasks, client, &cache);
  REQUIRE(outcomes.size() == 5);
  for (const auto& outcome : outcomes) {
    REQUIRE(outcome.ok());
    CHECK(outcome.verdict->score_forward == AlignmentScore::exact);
    CHECK(outcome.verdict->score_reversed == AlignmentScore::partial);
    CHECK(outcome.verdict->accuracy == 0.75);
    CHECK(outcome.verdict->binned == 0.5);  // {0.25, 0.5, 0.75} pool to partial
  }
  CHECK(server.total_calls() == 10);  // two prompts per item

  SECTION("a warm cache answers without the network") {
    server.reset_counters();
    VerdictCache warm(tmp.file("cache.jsonl"));
    const auto replay = judge_dataset(tasks, client, &warm);
    CHECK(server.total_calls() == 0);
    REQUIRE(replay.size() == outcomes.size());
    for (std::size_t i = 0; i < replay.size(); ++i) {
      REQUIRE(replay[i].ok());
      CHECK(replay[i].verdict->accuracy == outcomes[i].verdict->accuracy);
      CHECK(replay[i].fetched_at == outcomes[i].fetched_at);
    }
  }

  SECTION("the cache file never contains the API key") {
    const std::string cache_text = testutil::read_file(tmp.file("cache.jsonl"));
    CHECK(!cache_text.empty());
    CHECK(cache_text.find("sk-test-secret-xyz") == std::string::npos);
  }
}

TEST_CASE("an unparseable item fails in isolation", "[client][judge_runner]") {
  MockServer server;
  server.set_handler([](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    const std::string prompt = body["messages"][0]["content"].get<std::string>();
    MockServer::reply_text(res, prompt.find("question 2") != std::string::npos ? "banana" : "4");
  });
  ChatClient client(test_config(server));

  const auto tasks = sample_tasks(4);
  const auto outcomes = judge_dataset(tasks, client, nullptr);
  REQUIRE(outcomes.size() == 4);
  for (const auto& outcome : outcomes) {
    if (outcome.item_id == "item-2") {
      CHECK_FALSE(outcome.ok());
      CHECK(outcome.error.find("3 attempts") != std::string::npos);
    } else {
      CHECK(outcome.ok());
    }
  }
  // item 2 burned 3 attempts on each of its two prompts
  CHECK(server.total_calls() == 3 + 3 + 3 * 2);
}

TEST_CASE("endpoint failures surface per item without retrying rounds",
          "[client][judge_runner]") {
  MockServer server;
  server.set_handler([](const httplib::Request&, httplib::Response& res) { res.status = 400; });
  EndpointConfig cfg = test_config(server);
  ChatClient client(cfg);
  const auto tasks = sample_tasks(3);
  const auto outcomes = judge_dataset(tasks, client, nullptr);
  REQUIRE(outcomes.size() == 3);
  for (const auto& outcome : outcomes) {
    CHECK_FALSE(outcome.ok());
    CHECK_FALSE(outcome.error.empty());
  }
  CHECK(server.total_calls() == 6);  // one round, no protocol retries
}
