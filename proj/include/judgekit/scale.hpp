#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "judgekit/errors.hpp"

namespace judgekit {

/// Ordered set of distinct score values a rater may assign.
///
/// The canonical human scale is {0, 0.5, 1.0}: full credit, partial credit,
/// failure. All three values (and every other value this toolkit handles by
/// default) are exactly representable as doubles, so membership checks use
/// exact comparison.
class RatingScale {
public:
  explicit RatingScale(std::vector<double> categories) : categories_(std::move(categories)) {
    if (categories_.size() < 2) {
      throw OutOfRangeError("rating scale needs at least 2 categories");
    }
    for (std::size_t i = 1; i < categories_.size(); ++i) {
      if (!(categories_[i - 1] < categories_[i])) {
        throw OutOfRangeError("rating scale categories must be strictly increasing");
      }
    }
  }

  /// The three-point human annotation scale with partial credit.
  static RatingScale human() { return RatingScale({0.0, 0.5, 1.0}); }

  std::size_t size() const { return categories_.size(); }
  const std::vector<double>& categories() const { return categories_; }
  double value_at(std::size_t index) const { return categories_.at(index); }

  std::optional<std::size_t> index_of(double value) const {
    for (std::size_t i = 0; i < categories_.size(); ++i) {
      if (categories_[i] == value) return i;
    }
    return std::nullopt;
  }

  bool contains(double value) const { return index_of(value).has_value(); }

  friend bool operator==(const RatingScale& a, const RatingScale& b) {
    return a.categories_ == b.categories_;
  }

private:
  std::vector<double> categories_;
};

/// One rater's scores over a sequence of items, bound to a scale.
/// Scores are stored as category indices; values are recoverable on demand.
class RatingVector {
public:
  RatingVector(RatingScale scale, const std::vector<double>& scores)
      : scale_(std::move(scale)) {
    indices_.reserve(scores.size());
    for (double s : scores) {
      auto idx = scale_.index_of(s);
      if (!idx) {
        std::ostringstream msg;
        msg << "score " << s << " is not a category of the rating scale";
        throw OutOfRangeError(msg.str());
      }
      indices_.push_back(*idx);
    }
  }

  static RatingVector from_indices(RatingScale scale, std::vector<std::size_t> indices) {
    RatingVector v(std::move(scale));
    for (std::size_t idx : indices) {
      if (idx >= v.scale_.size()) {
        throw OutOfRangeError("category index out of range for scale");
      }
    }
    v.indices_ = std::move(indices);
    return v;
  }

  std::size_t size() const { return indices_.size(); }
  const RatingScale& scale() const { return scale_; }
  const std::vector<std::size_t>& indices() const { return indices_; }

  std::vector<double> values() const {
    std::vector<double> out;
    out.reserve(indices_.size());
    for (std::size_t idx : indices_) out.push_back(scale_.value_at(idx));
    return out;
  }

  bool is_constant() const {
    return std::all_of(indices_.begin(), indices_.end(),
                       [&](std::size_t i) { return i == indices_.front(); });
  }

private:
  explicit RatingVector(RatingScale scale) : scale_(std::move(scale)) {}

  RatingScale scale_;
  std::vector<std::size_t> indices_;
};

/// n_items x n_raters matrix of ratings over a shared scale. Cells may be
/// missing; Fleiss' kappa requires a complete panel, Krippendorff's alpha
/// tolerates gaps.
class RatingPanel {
public:
  RatingPanel(RatingScale scale, std::size_t n_raters)
      : scale_(std::move(scale)), n_raters_(n_raters) {
    if (n_raters_ < 2) {
      throw InsufficientDataError("panel needs at least 2 raters");
    }
  }

  /// Builds a complete panel from per-rater columns of equal length.
  static RatingPanel from_raters(std::span<const RatingVector> raters) {
    if (raters.size() < 2) {
      throw InsufficientDataError("panel needs at least 2 raters");
    }
    const RatingScale& scale = raters.front().scale();
    const std::size_t n = raters.front().size();
    for (const auto& r : raters) {
      if (!(r.scale() == scale)) throw ScaleMismatchError("panel raters use different scales");
      if (r.size() != n) throw LengthMismatchError("panel raters rate different item counts");
    }
    RatingPanel panel(scale, raters.size());
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::optional<std::size_t>> row;
      row.reserve(raters.size());
      for (const auto& r : raters) row.push_back(r.indices()[i]);
      panel.cells_.insert(panel.cells_.end(), row.begin(), row.end());
      ++panel.n_items_;
    }
    return panel;
  }

  /// Appends one item's ratings; entries without a value are missing cells.
  void add_item(const std::vector<std::optional<double>>& ratings) {
    if (ratings.size() != n_raters_) {
      throw LengthMismatchError("item must carry one entry per rater");
    }
    for (const auto& r : ratings) {
      if (r && !scale_.contains(*r)) {
        throw OutOfRangeError("rating is not a category of the panel scale");
      }
    }
    for (const auto& r : ratings) {
      cells_.push_back(r ? scale_.index_of(*r) : std::nullopt);
    }
    ++n_items_;
  }

  std::size_t n_items() const { return n_items_; }
  std::size_t n_raters() const { return n_raters_; }
  const RatingScale& scale() const { return scale_; }

  const std::optional<std::size_t>& cell(std::size_t item, std::size_t rater) const {
    return cells_.at(item * n_raters_ + rater);
  }

  bool complete() const {
    return std::all_of(cells_.begin(), cells_.end(),
                       [](const auto& c) { return c.has_value(); });
  }

private:
  RatingScale scale_;
  std::size_t n_raters_ = 0;
  std::size_t n_items_ = 0;
  std::vector<std::optional<std::size_t>> cells_;  // row-major item x rater
};

}  // namespace judgekit
