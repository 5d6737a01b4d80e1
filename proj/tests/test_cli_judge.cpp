#include <catch2/catch.hpp>

#include <cstdlib>
#include <sstream>

#include "judgekit/cli.hpp"
#include "mock_server.hpp"
#include "temp_dir.hpp"

using namespace judgekit;
using mock::MockServer;

namespace {

int run_cli(const std::vector<std::string>& args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int rc = cli::run(args, out, err);
  if (err_text) *err_text = err.str();
  return rc;
}

std::filesystem::path write_dataset(const testutil::TempDir& tmp, int n) {
  std::ostringstream data;
  for (int i = 0; i < n; ++i) {
    data << "{\"item_id\": \"item-" << i
         << "\", \"source_dataset\": \"s\", \"question\": \"question " << i
         << "\", \"reference_answer\": \"ref\", \"generated_answer\": \"gen\", "
         << "\"human_scores\": [0, 0.5, 1.0]}\n";
  }
  return tmp.write("dataset.jsonl", data.str());
}

void answer_by_direction(const httplib::Request& req, httplib::Response& res) {
  const auto body = nlohmann::json::parse(req.body);
  const std::string prompt = body["messages"][0]["content"].get<std::string>();
  const bool reversed = prompt.find("Candidate answer:") < prompt.find("Reference answer:");
  MockServer::reply_text(res, reversed ? "2" : "4");
}

}  // namespace

TEST_CASE("judge command writes one record per item", "[cli][judge_cmd]") {
  MockServer server;
  server.set_handler(answer_by_direction);
  testutil::TempDir tmp("cli_judge");
  const auto dataset = write_dataset(tmp, 10);
  const auto out = tmp.file("scores.jsonl");

  setenv("JUDGEKIT_API_KEY", "sk-cli-secret", 1);
  std::string err;
  const int rc = run_cli({"judge", "--dataset", dataset.string(), "--judge-id", "mock-judge",
                          "--base-url", server.base_url(), "--out", out.string()},
                         &err);
  unsetenv("JUDGEKIT_API_KEY");

  REQUIRE(rc == cli::kExitOk);
  CHECK(err.find("judging 10 items") != std::string::npos);
  const auto records = load_judge_scores(out);
  REQUIRE(records.size() == 10);
  for (const auto& rec : records) {
    CHECK(rec.judge_id == "mock-judge");
    CHECK(rec.accuracy == 0.75);
    CHECK(rec.binned == 0.5);
    CHECK(rec.template_version == "answer_accuracy_v1");
    CHECK_FALSE(rec.fetched_at.empty());
  }
  CHECK(server.total_calls() == 20);

  SECTION("a warm cache rerun makes zero calls and reproduces the file byte for byte") {
    const std::string first = testutil::read_file(out);
    server.reset_counters();
    REQUIRE(run_cli({"judge", "--dataset", dataset.string(), "--judge-id", "mock-judge",
                     "--base-url", server.base_url(), "--out", out.string()}) == cli::kExitOk);
    CHECK(server.total_calls() == 0);
    CHECK(testutil::read_file(out) == first);
  }

  SECTION("no secret material reaches any emitted artifact") {
    for (const auto& entry : std::filesystem::directory_iterator(tmp.path())) {
      const std::string bytes = testutil::read_file(entry.path());
      CHECK(bytes.find("sk-cli-secret") == std::string::npos);
    }
  }
}

TEST_CASE("judge command failure-rate contract", "[cli][judge_cmd]") {
  MockServer server;
  testutil::TempDir tmp("cli_judge_fail");
  const auto dataset = write_dataset(tmp, 10);

  // items 0..k-1 answer garbage, the rest are well-formed
  const auto fail_first = [](int k) {
    return [k](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body);
      const std::string prompt = body["messages"][0]["content"].get<std::string>();
      for (int i = 0; i < k; ++i) {
        if (prompt.find("question " + std::to_string(i) + "\n") != std::string::npos) {
          MockServer::reply_text(res, "no rating here");
          return;
        }
      }
      answer_by_direction(req, res);
    };
  };

  SECTION("2 of 10 failed items stay under a 0.3 limit") {
    server.set_handler(fail_first(2));
    const auto out = tmp.file("scores2.jsonl");
    std::string err;
    const int rc = run_cli({"judge", "--dataset", dataset.string(), "--judge-id", "j",
                            "--base-url", server.base_url(), "--out", out.string(),
                            "--max-failure-rate", "0.3"},
                           &err);
    CHECK(rc == cli::kExitOk);
    CHECK(load_judge_scores(out).size() == 8);
    CHECK(err.find("2/10 items failed") != std::string::npos);
    const std::string manifest = testutil::read_file(out.string() + ".failures");
    CHECK(manifest.find("item-0") != std::string::npos);
    CHECK(manifest.find("item-1") != std::string::npos);
  }

  SECTION("5 of 10 failed items exceed a 0.3 limit") {
    server.set_handler(fail_first(5));
    const auto out = tmp.file("scores5.jsonl");
    const int rc = run_cli({"judge", "--dataset", dataset.string(), "--judge-id", "j",
                            "--base-url", server.base_url(), "--out", out.string(),
                            "--max-failure-rate", "0.3"});
    CHECK(rc == cli::kExitEndpoint);
    CHECK(load_judge_scores(out).size() == 5);  // completed items are still persisted
  }
}

TEST_CASE("judge command with custom template files", "[cli][judge_cmd]") {
  MockServer server;
  server.set_handler(answer_by_direction);
  testutil::TempDir tmp("cli_judge_tpl");
  const auto dataset = write_dataset(tmp, 3);
  const std::string prompts_dir = std::string(JUDGEKIT_SOURCE_DIR) + "/data/prompts";

  const auto out = tmp.file("scores.jsonl");
  const int rc = run_cli({"judge", "--dataset", dataset.string(), "--judge-id", "j",
                          "--base-url", server.base_url(), "--out", out.string(),
                          "--prompt-forward", prompts_dir + "/answer_accuracy_forward_v1.txt",
                          "--prompt-reversed", prompts_dir + "/answer_accuracy_reversed_v1.txt",
                          "--template-version", "answer_accuracy_v1_files"});
  REQUIRE(rc == cli::kExitOk);
  const auto records = load_judge_scores(out);
  REQUIRE(records.size() == 3);
  CHECK(records[0].template_version == "answer_accuracy_v1_files");

  SECTION("one template flag without the other is rejected") {
    CHECK(run_cli({"judge", "--dataset", dataset.string(), "--judge-id", "j", "--base-url",
                   server.base_url(), "--out", tmp.file("x.jsonl").string(), "--prompt-forward",
                   prompts_dir + "/answer_accuracy_forward_v1.txt"}) == cli::kExitValidation);
  }
}

TEST_CASE("judge command maps endpoint failures to exit code 4", "[cli][judge_cmd]") {
  testutil::TempDir tmp("cli_judge_err");
  const auto dataset = write_dataset(tmp, 2);
  // nothing listens on this port; per-item errors push the failure rate to 1
  const int rc = run_cli({"judge", "--dataset", dataset.string(), "--judge-id", "j",
                          "--base-url", "http://127.0.0.1:1", "--out",
                          tmp.file("scores.jsonl").string(), "--timeout-ms", "200",
                          "--max-retries", "0"});
  CHECK(rc == cli::kExitEndpoint);
}
