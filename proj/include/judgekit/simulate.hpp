#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "judgekit/errors.hpp"
#include "judgekit/pipeline.hpp"
#include "judgekit/scale.hpp"

namespace judgekit {

/// Latent-agreement model for synthetic 4-rater panels on the human scale.
/// Each item draws a latent category; every rater reports it, except that
/// with probability `noise` the report slips to an adjacent category, and the
/// LLM additionally drifts one step toward an end of the scale with
/// probability |llm_bias| (negative bias drifts low, positive high).
struct PanelProfile {
  std::size_t n_items = 200;
  std::array<double, 3> latent_weights{0.2, 0.3, 0.5};
  double human_noise = 0.10;
  double llm_noise = 0.10;
  double llm_bias = 0.0;
};

namespace detail {

// Uniform doubles straight from the engine's bits, so simulated panels are
// identical across standard libraries, not just across runs.
class SeededUniform {
public:
  explicit SeededUniform(std::uint64_t seed) : engine_(seed) {}

  double next() { return double(engine_() >> 11) * 0x1.0p-53; }

  std::size_t pick_weighted(const std::array<double, 3>& weights, double total) {
    const double u = next() * total;
    double cum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      cum += weights[i];
      if (u < cum) return i;
    }
    return weights.size() - 1;
  }

private:
  std::mt19937_64 engine_;
};

inline std::size_t slip_adjacent(std::size_t idx, std::size_t n_categories, double coin) {
  if (idx == 0) return 1;
  if (idx == n_categories - 1) return n_categories - 2;
  return coin < 0.5 ? idx - 1 : idx + 1;
}

}  // namespace detail

inline void validate_profile(const PanelProfile& p) {
  if (p.n_items < 10) {
    throw InvalidProfileError("simulation needs at least 10 items");
  }
  double total = 0.0;
  for (double w : p.latent_weights) {
    if (w < 0.0) throw InvalidProfileError("latent weights must be non-negative");
    total += w;
  }
  if (total <= 0.0) {
    throw InvalidProfileError("latent weights must not all be zero");
  }
  if (p.human_noise < 0.0 || p.human_noise > 1.0 || p.llm_noise < 0.0 || p.llm_noise > 1.0) {
    throw InvalidProfileError("noise probabilities must lie in [0, 1]");
  }
  if (p.llm_bias < -1.0 || p.llm_bias > 1.0) {
    throw InvalidProfileError("llm_bias must lie in [-1, 1]");
  }
}

/// Deterministic under seed: same profile + seed always yields the same
/// group. Draw order is fixed per item (latent, three humans, LLM).
inline RaterGroup simulate_panel(const PanelProfile& profile, std::uint64_t seed) {
  validate_profile(profile);
  const RatingScale scale = RatingScale::human();
  const std::size_t K = scale.size();
  double weight_total = 0.0;
  for (double w : profile.latent_weights) weight_total += w;

  detail::SeededUniform rng(seed);
  std::array<std::vector<std::size_t>, 3> humans;
  std::vector<std::size_t> llm;
  for (auto& h : humans) h.reserve(profile.n_items);
  llm.reserve(profile.n_items);

  for (std::size_t i = 0; i < profile.n_items; ++i) {
    const std::size_t latent = rng.pick_weighted(profile.latent_weights, weight_total);
    for (auto& h : humans) {
      std::size_t idx = latent;
      const double noise_draw = rng.next();
      const double direction_draw = rng.next();
      if (noise_draw < profile.human_noise) {
        idx = detail::slip_adjacent(idx, K, direction_draw);
      }
      h.push_back(idx);
    }
    std::size_t idx = latent;
    const double noise_draw = rng.next();
    const double direction_draw = rng.next();
    if (noise_draw < profile.llm_noise) {
      idx = detail::slip_adjacent(idx, K, direction_draw);
    }
    const double bias_draw = rng.next();
    if (bias_draw < std::abs(profile.llm_bias)) {
      if (profile.llm_bias < 0.0 && idx > 0) --idx;
      if (profile.llm_bias > 0.0 && idx + 1 < K) ++idx;
    }
    llm.push_back(idx);
  }

  return RaterGroup({RatingVector::from_indices(scale, humans[0]),
                     RatingVector::from_indices(scale, humans[1]),
                     RatingVector::from_indices(scale, humans[2])},
                    RatingVector::from_indices(scale, llm));
}

}  // namespace judgekit
