#pragma once

#include <optional>
#include <string>
#include <vector>

#include "judgekit/cache.hpp"
#include "judgekit/client.hpp"
#include "judgekit/errors.hpp"
#include "judgekit/judge.hpp"

namespace judgekit {

/// Retry and scoring policy for a judging run.
struct JudgePolicy {
  std::size_t max_attempts = 3;  // per prompt, on unparseable output
  BinningRule binning = BinningRule::partial_pool;
};

/// Per-item outcome: a verdict, or an explicit failure. Failed items are
/// always present in the output, never dropped.
struct JudgeOutcome {
  std::string item_id;
  std::optional<JudgeVerdict> verdict;
  std::string error;
  std::string fetched_at;

  bool ok() const { return verdict.has_value(); }
};

namespace detail {

struct PromptSlot {
  std::size_t task_index = 0;
  bool reversed = false;
  std::string cache_key;
  std::string prompt;
  std::optional<std::string> response;  // filled from cache or network
  std::string fetched_at;
  std::size_t attempts = 0;
  std::string last_error;
};

}  // namespace detail

/// Runs the dual-prompt protocol over a task list. The two prompts per item
/// are independent requests; distinct prompts may run concurrently up to the
/// client's parallelism bound. Responses come from the cache when warm (zero
/// network calls), and parseable responses are cached as they arrive.
/// A prompt whose output stays unparseable after max_attempts marks its item
/// failed; the batch always completes.
inline std::vector<JudgeOutcome> judge_dataset(
    const std::vector<JudgeTask>& tasks, ChatClient& client, VerdictCache* cache,
    const PromptTemplates& templates = PromptTemplates::builtin(), const JudgePolicy& policy = {}) {
  const std::string& model_id = client.config().model_id;

  std::vector<detail::PromptSlot> slots;
  slots.reserve(tasks.size() * 2);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    validate_task(tasks[i]);
    const auto [forward, reversed] = build_prompts(tasks[i], templates);
    for (bool rev : {false, true}) {
      detail::PromptSlot slot;
      slot.task_index = i;
      slot.reversed = rev;
      slot.prompt = rev ? reversed : forward;
      slot.cache_key = VerdictCache::key_for(tasks[i], templates.version, model_id,
                                             rev ? "reversed" : "forward");
      if (cache) {
        if (auto hit = cache->lookup(slot.cache_key)) {
          slot.response = hit->response;
          slot.fetched_at = hit->fetched_at;
        }
      }
      slots.push_back(std::move(slot));
    }
  }

  // Rounds of batched completion for slots still lacking a parseable answer.
  for (std::size_t round = 0; round < policy.max_attempts; ++round) {
    std::vector<std::size_t> pending;
    std::vector<std::string> prompts;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      auto& slot = slots[s];
      if (slot.response) continue;
      if (slot.attempts >= policy.max_attempts) continue;
      pending.push_back(s);
      prompts.push_back(slot.prompt);
    }
    if (pending.empty()) break;

    const std::vector<CompletionResult> results = client.complete_batch(prompts);
    for (std::size_t p = 0; p < pending.size(); ++p) {
      auto& slot = slots[pending[p]];
      const auto& result = results[p];
      slot.attempts += 1;
      if (!result.ok()) {
        slot.last_error = result.error_message;
        slot.attempts = policy.max_attempts;  // transport errors already retried by the client
        continue;
      }
      try {
        parse_score(result.exchange->response_text);
      } catch (const UnparseableOutputError& e) {
        slot.last_error = e.what();
        continue;  // retry next round
      }
      slot.response = result.exchange->response_text;
      if (cache) {
        const auto& task = tasks[slot.task_index];
        const auto entry =
            cache->insert(slot.cache_key, task, templates.version, model_id,
                          slot.reversed ? "reversed" : "forward", *slot.response);
        slot.fetched_at = entry.fetched_at;
      }
    }
  }

  std::vector<JudgeOutcome> outcomes;
  outcomes.reserve(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    JudgeOutcome outcome;
    outcome.item_id = tasks[i].item_id;
    const auto& forward_slot = slots[2 * i];
    const auto& reversed_slot = slots[2 * i + 1];
    if (!forward_slot.response || !reversed_slot.response) {
      const auto& bad = !forward_slot.response ? forward_slot : reversed_slot;
      outcome.error = "no usable judge output after " + std::to_string(bad.attempts) +
                      " attempts" + (bad.last_error.empty() ? "" : ": " + bad.last_error);
      outcomes.push_back(std::move(outcome));
      continue;
    }
    JudgeVerdict verdict;
    verdict.item_id = tasks[i].item_id;
    verdict.raw_forward = *forward_slot.response;
    verdict.raw_reversed = *reversed_slot.response;
    verdict.score_forward = parse_score(verdict.raw_forward);
    verdict.score_reversed = parse_score(verdict.raw_reversed);
    const ScoredItem scored = score_item(verdict.score_forward, verdict.score_reversed,
                                         policy.binning);
    verdict.accuracy = scored.accuracy;
    verdict.binned = scored.binned;
    // later of the two fetch times, so reruns stay stable
    outcome.fetched_at = std::max(forward_slot.fetched_at, reversed_slot.fetched_at);
    outcome.verdict = std::move(verdict);
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

}  // namespace judgekit
