#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "judgekit/errors.hpp"
#include "judgekit/scale.hpp"

namespace judgekit {

// ---------------------------------------------------------------------------
// Weighting
// ---------------------------------------------------------------------------

/// Disagreement weighting for chance-corrected agreement coefficients.
/// Weights are a function of category *index* distance on the ordered scale,
/// the standard convention for weighted kappa. On a 2-category scale all
/// three kinds coincide.
enum class Weighting { unweighted, linear, quadratic };

inline const char* to_string(Weighting w) {
  switch (w) {
    case Weighting::unweighted: return "unweighted";
    case Weighting::linear: return "linear";
    case Weighting::quadratic: return "quadratic";
  }
  return "?";
}

/// Agreement credit in [0, 1] for a pair of category indices; 1 on the
/// diagonal, falling off with index distance.
inline double agreement_weight(Weighting w, std::size_t k, std::size_t l,
                               std::size_t n_categories) {
  const double d = k > l ? double(k - l) : double(l - k);
  const double span = double(n_categories - 1);
  switch (w) {
    case Weighting::unweighted: return k == l ? 1.0 : 0.0;
    case Weighting::linear: return 1.0 - d / span;
    case Weighting::quadratic: return 1.0 - (d / span) * (d / span);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Pearson correlation
// ---------------------------------------------------------------------------

/// Pearson's r between two equal-length vectors:
///   r = sum((x_i - mean_x)(y_i - mean_y)) / sqrt(sum(x-mean_x)^2 * sum(y-mean_y)^2)
/// Summation runs in index order so results are bit-stable across runs.
inline double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw LengthMismatchError("pearson_r: vectors have different lengths");
  }
  if (x.size() < 2) {
    throw LengthMismatchError("pearson_r: need at least 2 observations");
  }
  const std::size_t n = x.size();
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= double(n);
  mean_y /= double(n);

  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw ConstantInputError("pearson_r: input with zero variance");
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double pearson_r(const RatingVector& x, const RatingVector& y) {
  const std::vector<double> xv = x.values();
  const std::vector<double> yv = y.values();
  return pearson_r(std::span<const double>(xv), std::span<const double>(yv));
}

// ---------------------------------------------------------------------------
// Two-rater agreement
// ---------------------------------------------------------------------------

namespace detail {

inline void require_comparable(const RatingVector& a, const RatingVector& b) {
  if (!(a.scale() == b.scale())) {
    throw ScaleMismatchError("raters use different rating scales");
  }
  if (a.size() != b.size()) {
    throw LengthMismatchError("raters rated different item counts");
  }
}

// Marginal category distribution of a single rater.
inline std::vector<double> marginals(const RatingVector& v) {
  std::vector<double> p(v.scale().size(), 0.0);
  for (std::size_t idx : v.indices()) p[idx] += 1.0;
  for (double& x : p) x /= double(v.size());
  return p;
}

}  // namespace detail

/// Observed agreement P_o: mean per-item agreement credit. Unweighted this is
/// the fraction of exact matches; weighted it is 1 minus the normalized
/// weighted disagreement.
inline double observed_agreement(const RatingVector& a, const RatingVector& b, Weighting w) {
  detail::require_comparable(a, b);
  if (a.size() == 0) {
    throw LengthMismatchError("observed_agreement: empty rating vectors");
  }
  const std::size_t K = a.scale().size();
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total += agreement_weight(w, a.indices()[i], b.indices()[i], K);
  }
  return total / double(a.size());
}

/// Expected chance agreement P_e = sum_{k,l} p_a(k) p_b(l) w(k,l), computed
/// from the two raters' marginal category distributions.
inline double expected_agreement(const RatingVector& a, const RatingVector& b, Weighting w) {
  detail::require_comparable(a, b);
  if (a.size() == 0) {
    throw LengthMismatchError("expected_agreement: empty rating vectors");
  }
  const std::size_t K = a.scale().size();
  const std::vector<double> pa = detail::marginals(a);
  const std::vector<double> pb = detail::marginals(b);
  double pe = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t l = 0; l < K; ++l) {
      pe += pa[k] * pb[l] * agreement_weight(w, k, l, K);
    }
  }
  return pe;
}

/// Cohen's kappa = (P_o - P_e) / (1 - P_e). P_e = 1 only when both raters sit
/// constant on the same category, which leaves no room for chance correction.
inline double cohen_kappa(const RatingVector& a, const RatingVector& b, Weighting w) {
  detail::require_comparable(a, b);
  if (a.size() < 2) {
    throw LengthMismatchError("cohen_kappa: need at least 2 items");
  }
  const double po = observed_agreement(a, b, w);
  const double pe = expected_agreement(a, b, w);
  if (pe == 1.0) {
    throw DegenerateMarginalsError(
        "cohen_kappa: both raters constant on the same category (P_e = 1)");
  }
  return (po - pe) / (1.0 - pe);
}

// ---------------------------------------------------------------------------
// Multi-rater agreement
// ---------------------------------------------------------------------------

/// Fleiss-style multi-rater kappa with weighted disagreement. Treats raters
/// as interchangeable: P_o averages agreement credit over all rater pairs
/// within each item, P_e comes from the pooled category distribution.
/// Requires a complete panel; use krippendorff_alpha_ordinal when cells are
/// missing.
inline double fleiss_kappa_weighted(const RatingPanel& panel, Weighting w) {
  if (panel.n_raters() < 2) {
    throw InsufficientDataError("fleiss_kappa_weighted: need at least 2 raters");
  }
  if (panel.n_items() == 0) {
    throw InsufficientDataError("fleiss_kappa_weighted: empty panel");
  }
  if (!panel.complete()) {
    throw MissingCellError("fleiss_kappa_weighted: panel has missing cells");
  }
  const std::size_t n = panel.n_items();
  const std::size_t m = panel.n_raters();
  const std::size_t K = panel.scale().size();

  // Per-item category counts; pooled counts across the whole panel.
  std::vector<double> pooled(K, 0.0);
  double po_sum = 0.0;
  std::vector<double> counts(K);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(counts.begin(), counts.end(), 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t k = *panel.cell(i, r);
      counts[k] += 1.0;
      pooled[k] += 1.0;
    }
    // sum over ordered rater pairs of agreement credit, via counts
    for (std::size_t k = 0; k < K; ++k) {
      if (counts[k] == 0.0) continue;
      for (std::size_t l = 0; l < K; ++l) {
        if (counts[l] == 0.0) continue;
        const double pairs = counts[k] * (counts[l] - (k == l ? 1.0 : 0.0));
        po_sum += pairs * agreement_weight(w, k, l, K);
      }
    }
  }
  const double po = po_sum / (double(n) * double(m) * double(m - 1));
  double pe = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t l = 0; l < K; ++l) {
      pe += (pooled[k] / double(n * m)) * (pooled[l] / double(n * m)) *
            agreement_weight(w, k, l, K);
    }
  }
  if (pe == 1.0) {
    throw DegenerateMarginalsError(
        "fleiss_kappa_weighted: every rating in the same category (P_e = 1)");
  }
  return (po - pe) / (1.0 - pe);
}

/// Krippendorff's alpha with the ordinal difference function,
/// alpha = 1 - D_o / D_e, computed through the coincidence matrix. Items with
/// fewer than 2 ratings are ignored; missing cells are fine.
///
/// The ordinal distance between categories c <= k is the squared difference
/// of cumulative marginal frequencies:
///   delta(c, k) = (sum_{g=c..k} n_g - (n_c + n_k) / 2)^2
inline double krippendorff_alpha_ordinal(const RatingPanel& panel) {
  const std::size_t K = panel.scale().size();
  const std::size_t m = panel.n_raters();

  // Coincidence matrix over items with >= 2 ratings.
  std::vector<std::vector<double>> coincidence(K, std::vector<double>(K, 0.0));
  std::size_t pairable_items = 0;
  std::vector<std::size_t> present;
  for (std::size_t i = 0; i < panel.n_items(); ++i) {
    present.clear();
    for (std::size_t r = 0; r < m; ++r) {
      if (panel.cell(i, r)) present.push_back(*panel.cell(i, r));
    }
    const std::size_t mu = present.size();
    if (mu < 2) continue;
    ++pairable_items;
    for (std::size_t a = 0; a < mu; ++a) {
      for (std::size_t b = 0; b < mu; ++b) {
        if (a == b) continue;
        coincidence[present[a]][present[b]] += 1.0 / double(mu - 1);
      }
    }
  }
  if (pairable_items < 2) {
    throw InsufficientDataError(
        "krippendorff_alpha_ordinal: need at least 2 items with 2+ ratings");
  }

  std::vector<double> n_c(K, 0.0);
  double n_total = 0.0;
  for (std::size_t c = 0; c < K; ++c) {
    for (std::size_t k = 0; k < K; ++k) n_c[c] += coincidence[c][k];
    n_total += n_c[c];
  }

  // Ordinal metric from the coincidence marginals.
  const auto delta_sq = [&](std::size_t c, std::size_t k) {
    const std::size_t lo = std::min(c, k);
    const std::size_t hi = std::max(c, k);
    double cum = 0.0;
    for (std::size_t g = lo; g <= hi; ++g) cum += n_c[g];
    const double d = cum - (n_c[lo] + n_c[hi]) / 2.0;
    return d * d;
  };

  double d_obs = 0.0, d_exp = 0.0;
  for (std::size_t c = 0; c < K; ++c) {
    for (std::size_t k = 0; k < K; ++k) {
      if (c == k) continue;
      const double dsq = delta_sq(c, k);
      d_obs += coincidence[c][k] * dsq;
      d_exp += n_c[c] * n_c[k] * dsq;
    }
  }
  if (d_exp == 0.0) {
    throw InsufficientDataError(
        "krippendorff_alpha_ordinal: no category variation among pairable values");
  }
  return 1.0 - (n_total - 1.0) * d_obs / d_exp;
}

// ---------------------------------------------------------------------------
// Category scales
// ---------------------------------------------------------------------------

/// Landis & Koch agreement strength bands for kappa.
enum class AgreementCategory { poor, slight, fair, moderate, substantial, almost_perfect };

/// Correlation strength bands for Pearson's r.
enum class CorrelationCategory { none, weak, moderate, strong, very_strong };

inline const char* to_string(AgreementCategory c) {
  switch (c) {
    case AgreementCategory::poor: return "Poor";
    case AgreementCategory::slight: return "Slight";
    case AgreementCategory::fair: return "Fair";
    case AgreementCategory::moderate: return "Moderate";
    case AgreementCategory::substantial: return "Substantial";
    case AgreementCategory::almost_perfect: return "Almost Perfect";
  }
  return "?";
}

inline const char* to_string(CorrelationCategory c) {
  switch (c) {
    case CorrelationCategory::none: return "None";
    case CorrelationCategory::weak: return "Weak";
    case CorrelationCategory::moderate: return "Moderate";
    case CorrelationCategory::strong: return "Strong";
    case CorrelationCategory::very_strong: return "Very strong";
  }
  return "?";
}

/// Bands: poor < 0, slight [0, 0.21), fair [0.21, 0.41), moderate
/// [0.41, 0.61), substantial [0.61, 0.81), almost perfect [0.81, 1].
/// Values in the two-decimal gaps between bands fall to the band whose lower bound
/// they exceed.
inline AgreementCategory classify_kappa(double k) {
  if (!(k >= -1.0 && k <= 1.0)) {
    throw OutOfRangeError("classify_kappa: kappa must lie in [-1, 1]");
  }
  if (k < 0.0) return AgreementCategory::poor;
  if (k < 0.21) return AgreementCategory::slight;
  if (k < 0.41) return AgreementCategory::fair;
  if (k < 0.61) return AgreementCategory::moderate;
  if (k < 0.81) return AgreementCategory::substantial;
  return AgreementCategory::almost_perfect;
}

/// Bands over |r|: none [0, 0.10), weak [0.10, 0.30), moderate [0.30, 0.60),
/// strong [0.60, 0.80), very strong [0.80, 1].
inline CorrelationCategory classify_correlation(double r) {
  if (!(r >= -1.0 && r <= 1.0)) {
    throw OutOfRangeError("classify_correlation: r must lie in [-1, 1]");
  }
  const double a = std::fabs(r);
  if (a < 0.10) return CorrelationCategory::none;
  if (a < 0.30) return CorrelationCategory::weak;
  if (a < 0.60) return CorrelationCategory::moderate;
  if (a < 0.80) return CorrelationCategory::strong;
  return CorrelationCategory::very_strong;
}

}  // namespace judgekit
