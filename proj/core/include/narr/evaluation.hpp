#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "narr/model.hpp"

namespace narr {

// ---------------------------------------------------------------------------
// Rank correlation

/// Kendall tau-b (tie corrected), O(n log n). Throws ValidationError on length
/// mismatch or n < 2 and DegenerateError when either side is entirely tied.
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of average (mid) ranks.
double spearman_rho(std::span<const double> x, std::span<const double> y);

/// 1-based average ranks; tied values share the mean of their positions.
Vector average_ranks(std::span<const double> x);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// tanh(atanh(r) -/+ z / sqrt(n - 3)), z the two-sided normal quantile for `confidence`.
Interval fisher_ci(double r, std::size_t n, double confidence = 0.95);

// ---------------------------------------------------------------------------
// Peaks and turning points

struct Peak {
  std::size_t index = 0;
  double height = 0.0;
  double prominence = 0.0;

  bool operator==(const Peak&) const = default;
};

/// Local maxima with their topographic prominence. A flat run higher than both
/// neighbours counts once, at its left edge. Series shorter than three values
/// have no peaks.
std::vector<Peak> find_peaks(std::span<const double> series);

struct TurningPoint {
  std::size_t index = 0;
  /// True when the window held no peak and its midpoint was used instead.
  bool fallback = false;

  bool operator==(const TurningPoint&) const = default;
};

/// For each window the contained peak of greatest prominence (earliest on
/// ties), else the floor midpoint of the window.
std::vector<TurningPoint> assign_turning_points(std::span<const Peak> peaks, std::span<const IndexRange> windows);

/// Mean absolute position error over the turning points as a percentage of
/// the story length: 100 * mean(|p_i - g_i|) / n.
double tp_distance(std::span<const std::size_t> predicted, std::span<const std::size_t> gold, std::size_t n);

// ---------------------------------------------------------------------------
// Salience ranking

/// Sentence indices by descending score; ties keep the earlier index first.
std::vector<std::size_t> ranking_order(std::span<const double> scores);

/// Average precision over the ranking, optionally truncated after `cutoff`
/// positions (still divided by the number of relevant items).
double average_precision(std::span<const double> scores, const std::set<std::size_t>& gold,
                         std::optional<std::size_t> cutoff = std::nullopt);

/// Mean of per-chapter average precision.
double mean_average_precision(std::span<const double> average_precisions);

/// |top-k ∩ gold| / |gold|; k defaults to |gold|.
double recall_at_k(std::span<const double> scores, const std::set<std::size_t>& gold,
                   std::optional<std::size_t> k = std::nullopt);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// LCS-based ROUGE-L between a predicted and a reference token sequence.
RougeScore rouge_l(std::span<const std::string> predicted, std::span<const std::string> reference);

}  // namespace narr
