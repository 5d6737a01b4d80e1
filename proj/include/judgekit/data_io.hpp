#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "judgekit/errors.hpp"
#include "judgekit/scale.hpp"

namespace judgekit {

// Ordered JSON keeps field order stable on disk, which keeps outputs
// diffable and byte-deterministic.
using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Record types
// ---------------------------------------------------------------------------

/// One QA item with its three expert annotations on the {0, 0.5, 1} scale.
struct AnnotatedItem {
  std::string item_id;
  std::string source_dataset;
  std::string question;
  std::string reference_answer;
  std::string generated_answer;
  std::array<double, 3> human_scores{};
  ojson metadata = ojson::object();

  friend bool operator==(const AnnotatedItem&, const AnnotatedItem&) = default;

  ojson to_record() const {
    ojson j;
    j["item_id"] = item_id;
    j["source_dataset"] = source_dataset;
    j["question"] = question;
    j["reference_answer"] = reference_answer;
    j["generated_answer"] = generated_answer;
    j["human_scores"] = human_scores;
    j["metadata"] = metadata;
    return j;
  }
};

/// Persisted per-item judge output: the normalized accuracy plus its binned
/// value on the human scale, with provenance.
struct JudgeScoreRecord {
  std::string item_id;
  std::string judge_id;
  double accuracy = 0.0;  // one of {0, 0.25, 0.5, 0.75, 1}
  double binned = 0.0;    // one of {0, 0.5, 1}
  std::string template_version;
  std::string fetched_at;

  friend bool operator==(const JudgeScoreRecord&, const JudgeScoreRecord&) = default;

  ojson to_record() const {
    ojson j;
    j["item_id"] = item_id;
    j["judge_id"] = judge_id;
    j["accuracy"] = accuracy;
    j["binned"] = binned;
    j["template_version"] = template_version;
    j["fetched_at"] = fetched_at;
    return j;
  }

  static JudgeScoreRecord from_record(const ojson& j);
};

/// One row of the bundled judge performance matrix: precomputed correlation,
/// mean kappa, z-score, and the tier label it was assigned.
struct FixtureRow {
  std::string judge_id;
  double r = 0.0;
  double kappa = 0.0;
  double z = 0.0;
  std::string tier;

  friend bool operator==(const FixtureRow&, const FixtureRow&) = default;

  ojson to_record() const {
    ojson j;
    j["judge_id"] = judge_id;
    j["r"] = r;
    j["kappa"] = kappa;
    j["z"] = z;
    j["tier"] = tier;
    return j;
  }

  static FixtureRow from_record(const ojson& j);
};

// ---------------------------------------------------------------------------
// Field access helpers
// ---------------------------------------------------------------------------

namespace detail {

inline const ojson& require_field(const ojson& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ValidationError("", std::string("missing field '") + key + "'");
  }
  return *it;
}

inline std::string require_string(const ojson& j, const char* key) {
  const ojson& v = require_field(j, key);
  if (!v.is_string()) {
    throw ValidationError("", std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

inline double require_number(const ojson& j, const char* key) {
  const ojson& v = require_field(j, key);
  if (!v.is_number()) {
    throw ValidationError("", std::string("field '") + key + "' must be a number");
  }
  return v.get<double>();
}

inline std::string format_score(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace detail

inline JudgeScoreRecord JudgeScoreRecord::from_record(const ojson& j) {
  JudgeScoreRecord rec;
  rec.item_id = detail::require_string(j, "item_id");
  rec.judge_id = detail::require_string(j, "judge_id");
  rec.accuracy = detail::require_number(j, "accuracy");
  rec.binned = detail::require_number(j, "binned");
  rec.template_version = detail::require_string(j, "template_version");
  rec.fetched_at = detail::require_string(j, "fetched_at");
  static const std::array<double, 5> accuracy_levels{0.0, 0.25, 0.5, 0.75, 1.0};
  if (std::find(accuracy_levels.begin(), accuracy_levels.end(), rec.accuracy) ==
      accuracy_levels.end()) {
    throw ValidationError(rec.item_id,
                          "accuracy " + detail::format_score(rec.accuracy) +
                              " is not one of {0, 0.25, 0.5, 0.75, 1}");
  }
  if (rec.binned != 0.0 && rec.binned != 0.5 && rec.binned != 1.0) {
    throw ValidationError(rec.item_id, "binned score " + detail::format_score(rec.binned) +
                                           " is not one of {0, 0.5, 1}");
  }
  return rec;
}

inline FixtureRow FixtureRow::from_record(const ojson& j) {
  FixtureRow row;
  row.judge_id = detail::require_string(j, "judge_id");
  row.r = detail::require_number(j, "r");
  row.kappa = detail::require_number(j, "kappa");
  row.z = detail::require_number(j, "z");
  row.tier = detail::require_string(j, "tier");
  return row;
}

// ---------------------------------------------------------------------------
// Line-delimited JSON plumbing
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::pair<std::size_t, ojson>> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::vector<std::pair<std::size_t, ojson>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ojson j = ojson::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      throw ParseError(line_no, "invalid JSON");
    }
    if (!j.is_object()) {
      throw ParseError(line_no, "expected a JSON object");
    }
    out.emplace_back(line_no, std::move(j));
  }
  return out;
}

}  // namespace detail

/// Writes records to a line-delimited JSON file with stable field ordering.
template <class Row>
void store_results(std::span<const Row> rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  for (const Row& row : rows) {
    out << row.to_record().dump() << '\n';
  }
  out.flush();
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

template <class Row>
void store_results(const std::vector<Row>& rows, const std::filesystem::path& path) {
  store_results(std::span<const Row>(rows), path);
}

/// Reads back records written by store_results.
template <class Row>
std::vector<Row> load_results(const std::filesystem::path& path) {
  std::vector<Row> rows;
  for (const auto& [line_no, j] : detail::read_jsonl(path)) {
    try {
      rows.push_back(Row::from_record(j));
    } catch (const ValidationError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Dataset ingestion
// ---------------------------------------------------------------------------

/// Loads and validates an annotated dataset. Rejects malformed records,
/// scores off the {0, 0.5, 1} scale, wrong annotation counts, and duplicate
/// item ids, always naming the offending line.
inline std::vector<AnnotatedItem> load_dataset(const std::filesystem::path& path) {
  std::vector<AnnotatedItem> items;
  std::map<std::string, std::size_t> first_line_of;
  const RatingScale human = RatingScale::human();

  for (const auto& [line_no, j] : detail::read_jsonl(path)) {
    AnnotatedItem item;
    try {
      item.item_id = detail::require_string(j, "item_id");
      item.source_dataset = detail::require_string(j, "source_dataset");
      item.question = detail::require_string(j, "question");
      item.reference_answer = detail::require_string(j, "reference_answer");
      item.generated_answer = detail::require_string(j, "generated_answer");
      const ojson& scores = detail::require_field(j, "human_scores");
      if (!scores.is_array() || scores.size() != 3) {
        throw ValidationError(item.item_id, "human_scores must hold exactly 3 values");
      }
      for (std::size_t i = 0; i < 3; ++i) {
        if (!scores[i].is_number()) {
          throw ValidationError(item.item_id, "human_scores entries must be numbers");
        }
        const double v = scores[i].get<double>();
        if (!human.contains(v)) {
          throw ValidationError(item.item_id, "human score " + detail::format_score(v) +
                                                  " is not one of {0, 0.5, 1}");
        }
        item.human_scores[i] = v;
      }
      if (auto it = j.find("metadata"); it != j.end()) {
        if (!it->is_object()) {
          throw ValidationError(item.item_id, "metadata must be an object");
        }
        item.metadata = *it;
      }
      if (item.item_id.empty()) {
        throw ValidationError(item.item_id, "item_id must be non-empty");
      }
    } catch (const ValidationError& e) {
      throw ValidationError(e.item_id(),
                            std::string(e.what()) + " (line " + std::to_string(line_no) + ")");
    }
    if (auto [it, inserted] = first_line_of.emplace(item.item_id, line_no); !inserted) {
      throw ValidationError(item.item_id, "duplicate item_id (lines " +
                                              std::to_string(it->second) + " and " +
                                              std::to_string(line_no) + ")");
    }
    items.push_back(std::move(item));
  }
  return items;
}

/// Loads a judge performance fixture and checks the expected row count. The
/// bundled matrix carries 54 judges.
inline std::vector<FixtureRow> load_fixture(const std::filesystem::path& path,
                                            std::size_t expected_rows = 54) {
  std::vector<FixtureRow> rows = load_results<FixtureRow>(path);
  if (expected_rows != 0 && rows.size() != expected_rows) {
    throw RowCountMismatchError("fixture has " + std::to_string(rows.size()) +
                                " rows, expected " + std::to_string(expected_rows));
  }
  return rows;
}

/// Loads judge score records, all of which must carry the same judge_id.
inline std::vector<JudgeScoreRecord> load_judge_scores(const std::filesystem::path& path) {
  std::vector<JudgeScoreRecord> rows = load_results<JudgeScoreRecord>(path);
  for (const auto& row : rows) {
    if (row.judge_id != rows.front().judge_id) {
      throw ValidationError(row.item_id, "mixed judge_id values in one score file");
    }
  }
  return rows;
}

}  // namespace judgekit
