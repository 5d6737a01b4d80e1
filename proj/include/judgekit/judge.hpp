#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <utility>

#include "judgekit/errors.hpp"

namespace judgekit {

// ---------------------------------------------------------------------------
// Protocol types
// ---------------------------------------------------------------------------

/// One judging task: the question plus the two answers under comparison.
struct JudgeTask {
  std::string item_id;
  std::string question;
  std::string reference_answer;
  std::string generated_answer;
};

inline void validate_task(const JudgeTask& task) {
  if (task.question.empty() || task.reference_answer.empty() || task.generated_answer.empty()) {
    throw ValidationError(task.item_id, "judge task fields must be non-empty");
  }
}

/// The judge's discrete rating: no, partial, or exact alignment.
enum class AlignmentScore : int { none = 0, partial = 2, exact = 4 };

/// Output of the dual-prompt protocol for one item. accuracy is the mean of
/// the two normalized scores, (forward/4 + reversed/4) / 2; binned maps it
/// onto the 3-category human scale.
struct JudgeVerdict {
  std::string item_id;
  AlignmentScore score_forward = AlignmentScore::none;
  AlignmentScore score_reversed = AlignmentScore::none;
  double accuracy = 0.0;
  double binned = 0.0;
  std::string raw_forward;
  std::string raw_reversed;
};

// ---------------------------------------------------------------------------
// Prompt construction
// ---------------------------------------------------------------------------

/// Paired prompt texts with {question}, {reference}, {response} placeholders.
/// The forward template presents the reference answer before the candidate,
/// the reversed template swaps the two blocks. The version string enters the
/// verdict cache key, so edited templates never collide with cached results.
struct PromptTemplates {
  std::string version;
  std::string forward;
  std::string reversed;

  static const PromptTemplates& builtin();
  static PromptTemplates load(const std::filesystem::path& forward_path,
                              const std::filesystem::path& reversed_path, std::string version);
};

namespace detail {

inline std::string replace_all(std::string text, std::string_view token,
                               std::string_view replacement) {
  std::size_t pos = 0;
  while ((pos = text.find(token, pos)) != std::string::npos) {
    text.replace(pos, token.size(), replacement);
    pos += replacement.size();
  }
  return text;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

}  // namespace detail

inline const PromptTemplates& PromptTemplates::builtin() {
  static const PromptTemplates templates{
      "answer_accuracy_v1",
      "You are grading the answer to a question against a reference answer.\n"
      "Compare the two answers for factual and semantic agreement. Ignore\n"
      "differences in wording, ordering, or level of detail that do not change\n"
      "the meaning.\n"
      "\n"
      "Question:\n"
      "{question}\n"
      "\n"
      "Reference answer:\n"
      "{reference}\n"
      "\n"
      "Candidate answer:\n"
      "{response}\n"
      "\n"
      "Rate how well the candidate answer matches the reference answer:\n"
      "0 - no alignment with the reference\n"
      "2 - partial alignment with the reference\n"
      "4 - exact alignment with the reference\n"
      "\n"
      "Reply with the rating only. The last line of your reply must be exactly\n"
      "one of: 0, 2, or 4.\n",
      "You are grading the answer to a question against a reference answer.\n"
      "Compare the two answers for factual and semantic agreement. Ignore\n"
      "differences in wording, ordering, or level of detail that do not change\n"
      "the meaning.\n"
      "\n"
      "Question:\n"
      "{question}\n"
      "\n"
      "Candidate answer:\n"
      "{response}\n"
      "\n"
      "Reference answer:\n"
      "{reference}\n"
      "\n"
      "Rate how well the candidate answer matches the reference answer:\n"
      "0 - no alignment with the reference\n"
      "2 - partial alignment with the reference\n"
      "4 - exact alignment with the reference\n"
      "\n"
      "Reply with the rating only. The last line of your reply must be exactly\n"
      "one of: 0, 2, or 4.\n"};
  return templates;
}

inline PromptTemplates PromptTemplates::load(const std::filesystem::path& forward_path,
                                             const std::filesystem::path& reversed_path,
                                             std::string version) {
  PromptTemplates t;
  t.version = std::move(version);
  t.forward = detail::read_text_file(forward_path);
  t.reversed = detail::read_text_file(reversed_path);
  return t;
}

/// Renders the two prompts for a task. Deterministic: same task and
/// templates, same bytes.
inline std::pair<std::string, std::string> build_prompts(
    const JudgeTask& task, const PromptTemplates& templates = PromptTemplates::builtin()) {
  validate_task(task);
  const auto render = [&](const std::string& tpl) {
    std::string out = detail::replace_all(tpl, "{question}", task.question);
    out = detail::replace_all(out, "{reference}", task.reference_answer);
    out = detail::replace_all(out, "{response}", task.generated_answer);
    return out;
  };
  return {render(templates.forward), render(templates.reversed)};
}

// ---------------------------------------------------------------------------
// Output parsing
// ---------------------------------------------------------------------------

/// Extracts the rating from the model's reply. Grammar: the last non-empty
/// line, after an optional "Rating:" prefix and with surrounding whitespace
/// and punctuation stripped, must be exactly "0", "2", or "4".
inline AlignmentScore parse_score(std::string_view raw) {
  // last non-empty line
  std::size_t end = raw.size();
  while (true) {
    const std::size_t nl = raw.rfind('\n', end == 0 ? 0 : end - 1);
    const std::size_t start = nl == std::string_view::npos ? 0 : nl + 1;
    std::string_view line = raw.substr(start, end - start);
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
    while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
    if (!line.empty()) {
      constexpr std::string_view kPrefix = "rating:";
      if (line.size() >= kPrefix.size()) {
        std::string lowered(line.substr(0, kPrefix.size()));
        for (char& c : lowered) c = char(std::tolower(static_cast<unsigned char>(c)));
        if (lowered == kPrefix) line.remove_prefix(kPrefix.size());
      }
      const auto is_trim = [&](char c) {
        return is_space(c) || c == '.' || c == ',' || c == ';' || c == ':' || c == '!' ||
               c == '?' || c == '*' || c == '(' || c == ')' || c == '[' || c == ']' ||
               c == '\'' || c == '"' || c == '`';
      };
      while (!line.empty() && is_trim(line.front())) line.remove_prefix(1);
      while (!line.empty() && is_trim(line.back())) line.remove_suffix(1);
      if (line == "0") return AlignmentScore::none;
      if (line == "2") return AlignmentScore::partial;
      if (line == "4") return AlignmentScore::exact;
      throw UnparseableOutputError("no rating token in final line: '" + std::string(line) + "'");
    }
    if (nl == std::string_view::npos || start == 0) break;
    end = nl;
  }
  throw UnparseableOutputError("empty judge output");
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

/// How the 5-level accuracy maps onto the 3-category human scale before
/// kappa computation. partial_pool sends every intermediate level to 0.5;
/// nearest rounds to the closest category with ties rounding up.
enum class BinningRule { partial_pool, nearest };

inline const char* to_string(BinningRule rule) {
  switch (rule) {
    case BinningRule::partial_pool: return "pool";
    case BinningRule::nearest: return "nearest";
  }
  return "?";
}

inline double bin_accuracy(double accuracy, BinningRule rule = BinningRule::partial_pool) {
  switch (rule) {
    case BinningRule::partial_pool:
      if (accuracy == 0.0) return 0.0;
      if (accuracy == 1.0) return 1.0;
      return 0.5;
    case BinningRule::nearest:
      if (accuracy < 0.25) return 0.0;
      if (accuracy < 0.75) return 0.5;
      return 1.0;
  }
  return 0.0;
}

struct ScoredItem {
  double accuracy = 0.0;
  double binned = 0.0;
};

/// Combines the two discrete ratings: accuracy = (s1 + s2) / 8, exact in
/// double arithmetic, then bins it. Symmetric in its arguments.
inline ScoredItem score_item(AlignmentScore s1, AlignmentScore s2,
                             BinningRule rule = BinningRule::partial_pool) {
  const double accuracy = (double(int(s1)) + double(int(s2))) / 8.0;
  return ScoredItem{accuracy, bin_accuracy(accuracy, rule)};
}

}  // namespace judgekit
