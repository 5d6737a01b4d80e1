// Builds a synthetic 4-rater panel and walks it through the group analysis,
// printing the pairwise kappa matrix and the judge's z-score.

#include <cstdio>

#include "judgekit/pipeline.hpp"
#include "judgekit/simulate.hpp"

int main() {
  using namespace judgekit;

  PanelProfile profile;
  profile.n_items = 500;
  profile.human_noise = 0.12;
  profile.llm_noise = 0.12;
  profile.llm_bias = 0.0;

  const RaterGroup group = simulate_panel(profile, /*seed=*/7);
  const GroupStats stats = turing_test(group, Weighting::quadratic);

  std::printf("pairwise kappa (H1, H2, H3, LLM):\n");
  for (const auto& row : stats.pairwise_kappa) {
    std::printf("  %6.3f %6.3f %6.3f %6.3f\n", row[0], row[1], row[2], row[3]);
  }
  std::printf("mu_human = %.3f, sigma_human = %.3f, kappa_llm = %.3f\n", stats.mu_human,
              stats.sigma_human, stats.kappa_llm);
  if (stats.z) {
    std::printf("z = %.2f -> %s\n", *stats.z,
                *stats.z > 1.0   ? "super-consistent"
                : *stats.z < -1.0 ? "underperform"
                                  : "human-like");
  } else {
    std::printf("zero human variance; z undefined\n");
  }
  return 0;
}
