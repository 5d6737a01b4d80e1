#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "judgekit/data_io.hpp"
#include "judgekit/errors.hpp"
#include "judgekit/pipeline.hpp"

namespace judgekit {

// ---------------------------------------------------------------------------
// Bundle
// ---------------------------------------------------------------------------

struct CorrelationRow {
  std::string judge_id;
  double r = 0.0;
  CorrelationCategory category = CorrelationCategory::none;
};

struct JourneySummary {
  std::size_t total = 0;
  std::size_t gate_passed = 0;
  std::size_t gate_failed = 0;
  std::size_t tier1_total = 0;
  std::size_t human_like = 0;
  std::size_t super_consistent = 0;
  std::size_t underperform = 0;
  std::size_t zero_variance = 0;
};

/// Everything one evaluation run reports: the correlation leaderboard
/// (r descending), the consistency leaderboard (z descending), the threshold
/// sensitivity table, and the stage counts. Ties break on judge id.
struct ReportBundle {
  std::vector<CorrelationRow> correlation_leaderboard;
  std::vector<TierResult> tier_leaderboard;
  std::vector<SensitivityRow> sensitivity_table;
  JourneySummary journey;
};

namespace detail {

inline void sort_correlation(std::vector<CorrelationRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const CorrelationRow& a, const CorrelationRow& b) {
    if (a.r != b.r) return a.r > b.r;
    return a.judge_id < b.judge_id;
  });
}

inline void sort_tiers(std::vector<TierResult>& rows) {
  std::sort(rows.begin(), rows.end(), [](const TierResult& a, const TierResult& b) {
    if (a.z != b.z) return a.z > b.z;
    return a.judge_id < b.judge_id;
  });
}

inline void count_tier(JourneySummary& journey, Tier tier) {
  switch (tier) {
    case Tier::fail_correlation: break;  // already counted via the gate
    case Tier::underperform: ++journey.underperform; break;
    case Tier::human_like: ++journey.human_like; break;
    case Tier::super_consistent: ++journey.super_consistent; break;
  }
}

}  // namespace detail

/// Builds the bundle from live evaluation results.
inline ReportBundle build_report(const std::vector<JudgeEvaluation>& evaluations,
                                 const TierThresholds& thresholds = {},
                                 std::vector<double> sensitivity_thresholds = {0.5, 1.0, 1.5,
                                                                               1.96}) {
  ReportBundle bundle;
  std::vector<JudgePoint> points;
  for (const auto& eval : evaluations) {
    bundle.correlation_leaderboard.push_back(
        CorrelationRow{eval.judge_id, eval.r, classify_correlation(eval.r)});
    ++bundle.journey.total;
    eval.gate_passed ? ++bundle.journey.gate_passed : ++bundle.journey.gate_failed;
    if (eval.zero_human_variance()) {
      ++bundle.journey.zero_variance;
      continue;
    }
    bundle.tier_leaderboard.push_back(*eval.tier);
    detail::count_tier(bundle.journey, eval.tier->tier);
    points.push_back(JudgePoint{eval.r, *eval.stats.z});
  }
  bundle.journey.tier1_total = bundle.journey.human_like + bundle.journey.super_consistent;
  detail::sort_correlation(bundle.correlation_leaderboard);
  detail::sort_tiers(bundle.tier_leaderboard);
  if (!points.empty()) {
    bundle.sensitivity_table = sensitivity_analysis(points, std::move(sensitivity_thresholds),
                                                    thresholds.r_threshold);
  }
  return bundle;
}

/// Builds the bundle from precomputed (r, kappa, z) fixture rows, so tier
/// logic and sensitivity analysis run without raw scores.
inline ReportBundle build_report_from_fixture(const std::vector<FixtureRow>& rows,
                                              const TierThresholds& thresholds = {},
                                              std::vector<double> sensitivity_thresholds = {
                                                  0.5, 1.0, 1.5, 1.96}) {
  ReportBundle bundle;
  std::vector<JudgePoint> points;
  points.reserve(rows.size());
  for (const auto& row : rows) {
    bundle.correlation_leaderboard.push_back(
        CorrelationRow{row.judge_id, row.r, classify_correlation(row.r)});
    const TierResult tier = classify_tier(row.judge_id, row.r, row.kappa, row.z, thresholds);
    bundle.tier_leaderboard.push_back(tier);
    ++bundle.journey.total;
    tier.tier == Tier::fail_correlation ? ++bundle.journey.gate_failed
                                        : ++bundle.journey.gate_passed;
    detail::count_tier(bundle.journey, tier.tier);
    points.push_back(JudgePoint{row.r, row.z});
  }
  bundle.journey.tier1_total = bundle.journey.human_like + bundle.journey.super_consistent;
  detail::sort_correlation(bundle.correlation_leaderboard);
  detail::sort_tiers(bundle.tier_leaderboard);
  bundle.sensitivity_table =
      sensitivity_analysis(points, std::move(sensitivity_thresholds), thresholds.r_threshold);
  return bundle;
}

/// How many fixture rows get the same tier from classify_tier as the label
/// stored in the file.
inline std::size_t count_fixture_tier_matches(const std::vector<FixtureRow>& rows,
                                              const TierThresholds& thresholds = {}) {
  std::size_t matches = 0;
  for (const auto& row : rows) {
    if (to_string(assign_tier(row.r, row.z, thresholds)) == row.tier) ++matches;
  }
  return matches;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

enum class ReportFormat { markdown, csv, jsonl };

namespace detail {

// Report precision mirrors the conventional presentation of these
// statistics: r and kappa to 3 decimals, z to 2. All three formats emit the
// same rounded values so they stay mutually consistent.
inline std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline double round_like(const std::string& formatted) { return std::stod(formatted); }

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  return out;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline void write_correlation_leaderboard(const ReportBundle& bundle,
                                          const std::filesystem::path& dir, ReportFormat format) {
  using namespace detail;
  const auto& rows = bundle.correlation_leaderboard;
  switch (format) {
    case ReportFormat::markdown: {
      auto out = open_out(dir / "correlation_leaderboard.md");
      out << "# Correlation Leaderboard\n\n"
          << "| Rank | Judge | r | Category |\n|---:|:---|---:|:---|\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        out << "| " << (i + 1) << " | " << rows[i].judge_id << " | " << fmt3(rows[i].r) << " | "
            << to_string(rows[i].category) << " |\n";
      }
      break;
    }
    case ReportFormat::csv: {
      auto out = open_out(dir / "correlation_leaderboard.csv");
      out << "rank,judge_id,r,category\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        out << (i + 1) << ',' << csv_escape(rows[i].judge_id) << ',' << fmt3(rows[i].r) << ','
            << to_string(rows[i].category) << '\n';
      }
      break;
    }
    case ReportFormat::jsonl: {
      auto out = open_out(dir / "correlation_leaderboard.jsonl");
      for (std::size_t i = 0; i < rows.size(); ++i) {
        ojson j;
        j["rank"] = i + 1;
        j["judge_id"] = rows[i].judge_id;
        j["r"] = round_like(fmt3(rows[i].r));
        j["category"] = to_string(rows[i].category);
        out << j.dump() << '\n';
      }
      break;
    }
  }
}

inline void write_tier_leaderboard(const ReportBundle& bundle, const std::filesystem::path& dir,
                                   ReportFormat format) {
  using namespace detail;
  const auto& rows = bundle.tier_leaderboard;
  switch (format) {
    case ReportFormat::markdown: {
      auto out = open_out(dir / "tier_leaderboard.md");
      out << "# Consistency Leaderboard\n\n"
          << "| Rank | Judge | Kappa | Z | Tier |\n|---:|:---|---:|---:|:---|\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        out << "| " << (i + 1) << " | " << rows[i].judge_id << " | " << fmt3(rows[i].kappa_mean)
            << " | " << fmt2(rows[i].z) << " | " << to_string(rows[i].tier) << " |\n";
      }
      break;
    }
    case ReportFormat::csv: {
      auto out = open_out(dir / "tier_leaderboard.csv");
      out << "rank,judge_id,kappa,z,tier\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        out << (i + 1) << ',' << csv_escape(rows[i].judge_id) << ',' << fmt3(rows[i].kappa_mean)
            << ',' << fmt2(rows[i].z) << ',' << to_string(rows[i].tier) << '\n';
      }
      break;
    }
    case ReportFormat::jsonl: {
      auto out = open_out(dir / "tier_leaderboard.jsonl");
      for (std::size_t i = 0; i < rows.size(); ++i) {
        ojson j;
        j["rank"] = i + 1;
        j["judge_id"] = rows[i].judge_id;
        j["kappa"] = round_like(fmt3(rows[i].kappa_mean));
        j["z"] = round_like(fmt2(rows[i].z));
        j["tier"] = to_string(rows[i].tier);
        out << j.dump() << '\n';
      }
      break;
    }
  }
}

inline void write_sensitivity_table(const std::vector<SensitivityRow>& rows,
                                    const std::filesystem::path& dir, ReportFormat format) {
  using namespace detail;
  switch (format) {
    case ReportFormat::markdown: {
      auto out = open_out(dir / "sensitivity.md");
      out << "# Z-Threshold Sensitivity\n\n"
          << "| Z threshold | Tier 1 total | Human-like | Super-consistent |\n"
          << "|---:|---:|---:|---:|\n";
      for (const auto& row : rows) {
        out << "| " << fmt2(row.z_threshold) << " | " << row.tier1_total << " | "
            << row.human_like << " | " << row.super_consistent << " |\n";
      }
      break;
    }
    case ReportFormat::csv: {
      auto out = open_out(dir / "sensitivity.csv");
      out << "z_threshold,tier1_total,human_like,super_consistent\n";
      for (const auto& row : rows) {
        out << fmt2(row.z_threshold) << ',' << row.tier1_total << ',' << row.human_like << ','
            << row.super_consistent << '\n';
      }
      break;
    }
    case ReportFormat::jsonl: {
      auto out = open_out(dir / "sensitivity.jsonl");
      for (const auto& row : rows) {
        ojson j;
        j["z_threshold"] = round_like(fmt2(row.z_threshold));
        j["tier1_total"] = row.tier1_total;
        j["human_like"] = row.human_like;
        j["super_consistent"] = row.super_consistent;
        out << j.dump() << '\n';
      }
      break;
    }
  }
}

inline void write_journey_summary(const JourneySummary& journey, const std::filesystem::path& dir,
                                  ReportFormat format) {
  using namespace detail;
  const std::vector<std::pair<std::string, std::size_t>> stages = {
      {"judges_evaluated", journey.total},
      {"gate_passed", journey.gate_passed},
      {"gate_failed", journey.gate_failed},
      {"tier1_total", journey.tier1_total},
      {"human_like", journey.human_like},
      {"super_consistent", journey.super_consistent},
      {"underperform", journey.underperform},
      {"zero_human_variance", journey.zero_variance},
  };
  switch (format) {
    case ReportFormat::markdown: {
      auto out = open_out(dir / "journey.md");
      out << "# Evaluation Journey\n\n| Stage | Count |\n|:---|---:|\n";
      for (const auto& [name, count] : stages) {
        out << "| " << name << " | " << count << " |\n";
      }
      break;
    }
    case ReportFormat::csv: {
      auto out = open_out(dir / "journey.csv");
      out << "stage,count\n";
      for (const auto& [name, count] : stages) {
        out << name << ',' << count << '\n';
      }
      break;
    }
    case ReportFormat::jsonl: {
      auto out = open_out(dir / "journey.jsonl");
      ojson j;
      for (const auto& [name, count] : stages) j[name] = count;
      out << j.dump() << '\n';
      break;
    }
  }
}

/// Writes the bundle into a directory in the requested formats.
inline void write_report(const ReportBundle& bundle, const std::filesystem::path& dir,
                         const std::set<ReportFormat>& formats = {ReportFormat::markdown,
                                                                  ReportFormat::csv,
                                                                  ReportFormat::jsonl}) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create report directory " + dir.string());
  }
  for (ReportFormat format : formats) {
    write_correlation_leaderboard(bundle, dir, format);
    write_tier_leaderboard(bundle, dir, format);
    write_sensitivity_table(bundle.sensitivity_table, dir, format);
    write_journey_summary(bundle.journey, dir, format);
  }
}

}  // namespace judgekit
