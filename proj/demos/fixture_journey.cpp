// Replays the bundled judge performance matrix and prints the evaluation
// journey counts. Run from the repository root.

#include <cstdio>

#include "judgekit/data_io.hpp"
#include "judgekit/report.hpp"

int main(int argc, char** argv) {
  using namespace judgekit;

  const char* path = argc > 1 ? argv[1] : "data/judge_performance_matrix.jsonl";
  const auto rows = load_fixture(path);
  const ReportBundle bundle = build_report_from_fixture(rows);

  std::printf("judges: %zu\n", bundle.journey.total);
  std::printf("passed correlation gate: %zu\n", bundle.journey.gate_passed);
  std::printf("tier 1: %zu (%zu human-like + %zu super-consistent)\n", bundle.journey.tier1_total,
              bundle.journey.human_like, bundle.journey.super_consistent);
  std::printf("underperform: %zu\n", bundle.journey.underperform);
  std::printf("top of the consistency leaderboard: %s (kappa %.3f, z %.2f)\n",
              bundle.tier_leaderboard.front().judge_id.c_str(),
              bundle.tier_leaderboard.front().kappa_mean, bundle.tier_leaderboard.front().z);
  return 0;
}
