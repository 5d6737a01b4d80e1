#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "judgekit/agreement.hpp"
#include "judgekit/data_io.hpp"
#include "judgekit/errors.hpp"
#include "judgekit/scale.hpp"

namespace judgekit {

// ---------------------------------------------------------------------------
// Rater groups
// ---------------------------------------------------------------------------

/// Exactly 3 human raters plus one LLM judge over the same items and scale.
/// This is the 4-rater group the human-likeness analysis operates on.
class RaterGroup {
public:
  RaterGroup(std::array<RatingVector, 3> humans, RatingVector llm)
      : humans_(std::move(humans)), llm_(std::move(llm)) {
    const RatingScale& scale = llm_.scale();
    for (const auto& h : humans_) {
      if (!(h.scale() == scale)) {
        throw ScaleMismatchError("rater group members use different scales");
      }
      if (h.size() != llm_.size()) {
        throw LengthMismatchError("rater group members rate different item counts");
      }
    }
    if (llm_.size() < 2) {
      throw LengthMismatchError("rater group needs at least 2 items");
    }
  }

  const std::array<RatingVector, 3>& humans() const { return humans_; }
  const RatingVector& llm() const { return llm_; }
  std::size_t n_items() const { return llm_.size(); }

private:
  std::array<RatingVector, 3> humans_;
  RatingVector llm_;
};

/// Pairwise kappa matrix and derived group statistics. Raters are indexed
/// H1, H2, H3, LLM; the mean and standard deviation cover only the 3
/// human-human pairs, with the population form (divide by 3). z is absent
/// when the human pairs agree identically (sigma = 0) -- that degenerate
/// outcome is reported, not computed around.
struct GroupStats {
  std::array<std::array<double, 4>, 4> pairwise_kappa{};
  double mu_human = 0.0;
  double sigma_human = 0.0;
  double kappa_llm = 0.0;
  std::optional<double> z;

  bool zero_human_variance() const { return !z.has_value(); }
};

/// Mean LLM-vs-human kappa against a fixed human-human reference value.
struct StaticBaseline {
  double baseline_kappa = 0.801;
  double kappa_llm_mean = 0.0;
};

// ---------------------------------------------------------------------------
// Step 1: correlation gate
// ---------------------------------------------------------------------------

struct GateResult {
  double r = 0.0;
  bool passed = false;
};

/// Pearson correlation between judge accuracy scores and the per-item human
/// consensus (mean of the 3 annotations); passes at r >= threshold.
inline GateResult correlation_gate(std::span<const double> llm_scores,
                                   std::span<const double> human_consensus,
                                   double threshold = 0.80) {
  const double r = pearson_r(llm_scores, human_consensus);
  return GateResult{r, r >= threshold};
}

/// Per-item mean of the three human scores.
inline std::vector<double> human_consensus(std::span<const AnnotatedItem> items) {
  std::vector<double> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    out.push_back((item.human_scores[0] + item.human_scores[1] + item.human_scores[2]) / 3.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Step 2: kappa analysis
// ---------------------------------------------------------------------------

/// Mean kappa of the LLM against each human individually, compared to a
/// fixed human-human baseline.
inline StaticBaseline static_baseline_test(const RaterGroup& group, Weighting w,
                                           double baseline_kappa = 0.801) {
  StaticBaseline out;
  out.baseline_kappa = baseline_kappa;
  double sum = 0.0;
  for (const auto& human : group.humans()) {
    sum += cohen_kappa(group.llm(), human, w);
  }
  out.kappa_llm_mean = sum / 3.0;
  return out;
}

/// Group analysis: full 4x4 pairwise kappa matrix, human mean and population
/// standard deviation over the 3 human pairs, and the LLM's z-score
///   z = (kappa_llm - mu_human) / sigma_human.
inline GroupStats turing_test(const RaterGroup& group, Weighting w) {
  GroupStats stats;
  std::array<const RatingVector*, 4> raters{&group.humans()[0], &group.humans()[1],
                                            &group.humans()[2], &group.llm()};
  for (std::size_t i = 0; i < 4; ++i) {
    stats.pairwise_kappa[i][i] = 1.0;
    for (std::size_t j = i + 1; j < 4; ++j) {
      const double k = cohen_kappa(*raters[i], *raters[j], w);
      stats.pairwise_kappa[i][j] = k;
      stats.pairwise_kappa[j][i] = k;
    }
  }

  const std::array<double, 3> human_pairs{stats.pairwise_kappa[0][1], stats.pairwise_kappa[0][2],
                                          stats.pairwise_kappa[1][2]};
  stats.mu_human = (human_pairs[0] + human_pairs[1] + human_pairs[2]) / 3.0;
  double var = 0.0;
  for (double k : human_pairs) {
    var += (k - stats.mu_human) * (k - stats.mu_human);
  }
  var /= 3.0;  // population form
  stats.sigma_human = std::sqrt(var);

  stats.kappa_llm =
      (stats.pairwise_kappa[3][0] + stats.pairwise_kappa[3][1] + stats.pairwise_kappa[3][2]) / 3.0;

  if (stats.sigma_human > 0.0) {
    stats.z = (stats.kappa_llm - stats.mu_human) / stats.sigma_human;
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Tier classification
// ---------------------------------------------------------------------------

enum class Tier { fail_correlation, underperform, human_like, super_consistent };

inline const char* to_string(Tier t) {
  switch (t) {
    case Tier::fail_correlation: return "Fail Correlation";
    case Tier::underperform: return "Underperform";
    case Tier::human_like: return "Human-like";
    case Tier::super_consistent: return "Super-consistent";
  }
  return "?";
}

inline std::optional<Tier> tier_from_string(const std::string& s) {
  if (s == "Fail Correlation") return Tier::fail_correlation;
  if (s == "Underperform") return Tier::underperform;
  if (s == "Human-like") return Tier::human_like;
  if (s == "Super-consistent") return Tier::super_consistent;
  return std::nullopt;
}

/// Gate and human-likeness thresholds. The default z boundary is inclusive
/// (|z| <= z_threshold counts as human-like) so the partition of (r, z) space
/// is exhaustive; the strict flag switches to |z| < z_threshold, pushing the
/// exact boundary into the super-consistent / underperform bands.
struct TierThresholds {
  double r_threshold = 0.80;
  double z_threshold = 1.0;
  bool strict_z_boundary = false;
};

struct TierResult {
  std::string judge_id;
  double r = 0.0;
  double kappa_mean = 0.0;
  double z = 0.0;
  CorrelationCategory correlation_category = CorrelationCategory::none;
  Tier tier = Tier::fail_correlation;

  friend bool operator==(const TierResult&, const TierResult&) = default;

  ojson to_record() const {
    ojson j;
    j["judge_id"] = judge_id;
    j["r"] = r;
    j["kappa"] = kappa_mean;
    j["z"] = z;
    j["correlation_category"] = to_string(correlation_category);
    j["tier"] = to_string(tier);
    return j;
  }

  static TierResult from_record(const ojson& j);
};

/// Deterministic tier assignment: the correlation gate applies first, then
/// the z bands. Exactly one tier per (r, z) input.
inline Tier assign_tier(double r, double z, const TierThresholds& cfg = {}) {
  if (!std::isfinite(r) || !std::isfinite(z)) {
    throw OutOfRangeError("assign_tier: r and z must be finite");
  }
  if (r < cfg.r_threshold) return Tier::fail_correlation;
  if (cfg.strict_z_boundary) {
    if (std::fabs(z) < cfg.z_threshold) return Tier::human_like;
    return z > 0.0 ? Tier::super_consistent : Tier::underperform;
  }
  if (z > cfg.z_threshold) return Tier::super_consistent;
  if (z < -cfg.z_threshold) return Tier::underperform;
  return Tier::human_like;
}

inline std::optional<CorrelationCategory> correlation_category_from_string(const std::string& s) {
  for (auto c : {CorrelationCategory::none, CorrelationCategory::weak,
                 CorrelationCategory::moderate, CorrelationCategory::strong,
                 CorrelationCategory::very_strong}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

inline TierResult TierResult::from_record(const ojson& j) {
  TierResult result;
  result.judge_id = detail::require_string(j, "judge_id");
  result.r = detail::require_number(j, "r");
  result.kappa_mean = detail::require_number(j, "kappa");
  result.z = detail::require_number(j, "z");
  const std::string category = detail::require_string(j, "correlation_category");
  if (auto c = correlation_category_from_string(category)) {
    result.correlation_category = *c;
  } else {
    throw ValidationError(result.judge_id, "unknown correlation category '" + category + "'");
  }
  const std::string tier = detail::require_string(j, "tier");
  if (auto t = tier_from_string(tier)) {
    result.tier = *t;
  } else {
    throw ValidationError(result.judge_id, "unknown tier label '" + tier + "'");
  }
  return result;
}

inline TierResult classify_tier(std::string judge_id, double r, double kappa_mean, double z,
                                const TierThresholds& cfg = {}) {
  TierResult result;
  result.judge_id = std::move(judge_id);
  result.r = r;
  result.kappa_mean = kappa_mean;
  result.z = z;
  result.correlation_category = classify_correlation(r);
  result.tier = assign_tier(r, z, cfg);
  return result;
}

// ---------------------------------------------------------------------------
// Threshold sensitivity
// ---------------------------------------------------------------------------

struct SensitivityRow {
  double z_threshold = 0.0;
  std::size_t tier1_total = 0;
  std::size_t human_like = 0;
  std::size_t super_consistent = 0;

  friend bool operator==(const SensitivityRow&, const SensitivityRow&) = default;

  ojson to_record() const {
    ojson j;
    j["z_threshold"] = z_threshold;
    j["tier1_total"] = tier1_total;
    j["human_like"] = human_like;
    j["super_consistent"] = super_consistent;
    return j;
  }
};

struct JudgePoint {
  double r = 0.0;
  double z = 0.0;
};

/// Tier-1 composition as the z threshold varies, holding the correlation
/// gate fixed: human_like counts |z| < t, super_consistent counts z > t,
/// both restricted to judges with r >= r_threshold. Thresholds are emitted
/// in ascending order regardless of input order.
inline std::vector<SensitivityRow> sensitivity_analysis(std::span<const JudgePoint> judges,
                                                        std::vector<double> z_thresholds,
                                                        double r_threshold = 0.80) {
  if (judges.empty()) {
    throw EmptyInputError("sensitivity_analysis: no judges given");
  }
  if (z_thresholds.empty()) {
    throw EmptyInputError("sensitivity_analysis: no thresholds given");
  }
  std::sort(z_thresholds.begin(), z_thresholds.end());
  std::vector<SensitivityRow> rows;
  rows.reserve(z_thresholds.size());
  for (double t : z_thresholds) {
    SensitivityRow row;
    row.z_threshold = t;
    for (const auto& j : judges) {
      if (j.r < r_threshold) continue;
      if (std::fabs(j.z) < t) {
        ++row.human_like;
      } else if (j.z > t) {
        ++row.super_consistent;
      }
    }
    row.tier1_total = row.human_like + row.super_consistent;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Full evaluation
// ---------------------------------------------------------------------------

struct EvaluationConfig {
  Weighting weighting = Weighting::quadratic;
  TierThresholds thresholds{};
};

/// Everything the pipeline learned about one judge. tier is absent exactly
/// when the human pairs showed zero variance, which makes the z-score
/// undefined; gate provenance is still reported in that case.
struct JudgeEvaluation {
  std::string judge_id;
  double r = 0.0;
  bool gate_passed = false;
  GroupStats stats;
  std::optional<TierResult> tier;

  bool zero_human_variance() const { return stats.zero_human_variance(); }
};

/// A judge's scores aligned to a dataset: the raw 5-level accuracies feed the
/// correlation gate, the binned 3-level scores feed the kappa analysis.
struct AlignedJudgeScores {
  std::string judge_id;
  std::vector<double> accuracy;
  std::vector<double> binned;
};

/// Orders judge score records to match the dataset items. Every dataset item
/// must be scored exactly once; extra or missing ids are alignment failures.
inline AlignedJudgeScores align_scores(std::span<const AnnotatedItem> items,
                                       std::span<const JudgeScoreRecord> records) {
  AlignedJudgeScores out;
  if (records.empty()) {
    throw AlignmentError("no score records given");
  }
  out.judge_id = records.front().judge_id;
  std::map<std::string, const JudgeScoreRecord*> by_id;
  for (const auto& rec : records) {
    if (!by_id.emplace(rec.item_id, &rec).second) {
      throw AlignmentError("judge '" + out.judge_id + "' scores item '" + rec.item_id +
                           "' more than once");
    }
  }
  out.accuracy.reserve(items.size());
  out.binned.reserve(items.size());
  for (const auto& item : items) {
    auto it = by_id.find(item.item_id);
    if (it == by_id.end()) {
      throw AlignmentError("judge '" + out.judge_id + "' is missing item '" + item.item_id + "'");
    }
    out.accuracy.push_back(it->second->accuracy);
    out.binned.push_back(it->second->binned);
    by_id.erase(it);
  }
  if (!by_id.empty()) {
    throw AlignmentError("judge '" + out.judge_id + "' scores unknown item '" +
                         by_id.begin()->first + "'");
  }
  return out;
}

/// Runs the two-step evaluation for one judge against the dataset's human
/// annotations.
inline JudgeEvaluation evaluate_judge(std::span<const AnnotatedItem> items,
                                      const AlignedJudgeScores& scores,
                                      const EvaluationConfig& cfg = {}) {
  const std::vector<double> consensus = human_consensus(items);
  const GateResult gate =
      correlation_gate(scores.accuracy, consensus, cfg.thresholds.r_threshold);

  const RatingScale scale = RatingScale::human();
  std::vector<double> h1, h2, h3;
  h1.reserve(items.size());
  h2.reserve(items.size());
  h3.reserve(items.size());
  for (const auto& item : items) {
    h1.push_back(item.human_scores[0]);
    h2.push_back(item.human_scores[1]);
    h3.push_back(item.human_scores[2]);
  }
  RaterGroup group({RatingVector(scale, h1), RatingVector(scale, h2), RatingVector(scale, h3)},
                   RatingVector(scale, scores.binned));

  JudgeEvaluation eval;
  eval.judge_id = scores.judge_id;
  eval.r = gate.r;
  eval.gate_passed = gate.passed;
  eval.stats = turing_test(group, cfg.weighting);
  if (!eval.stats.zero_human_variance()) {
    eval.tier = classify_tier(scores.judge_id, gate.r, eval.stats.kappa_llm, *eval.stats.z,
                              cfg.thresholds);
  }
  return eval;
}

/// Evaluates every judge and returns results ordered by z descending with
/// judge id as the tiebreaker; judges without a defined z sort last.
inline std::vector<JudgeEvaluation> run_full_evaluation(
    const std::vector<AnnotatedItem>& items, const std::vector<AlignedJudgeScores>& judges,
    const EvaluationConfig& cfg = {}) {
  std::vector<JudgeEvaluation> results;
  results.reserve(judges.size());
  for (const auto& judge : judges) {
    results.push_back(evaluate_judge(items, judge, cfg));
  }
  std::sort(results.begin(), results.end(), [](const JudgeEvaluation& a, const JudgeEvaluation& b) {
    const bool az = a.stats.z.has_value(), bz = b.stats.z.has_value();
    if (az != bz) return az;  // defined z first
    if (az && bz && *a.stats.z != *b.stats.z) return *a.stats.z > *b.stats.z;
    return a.judge_id < b.judge_id;
  });
  return results;
}

}  // namespace judgekit
