#pragma once

#include <optional>
#include <span>
#include <vector>

#include "narr/model.hpp"

namespace narr {

/// Numeric value of each relative judgment. Defaults are the standard
/// constants; the ordering BD < D < S < I < BI with Same = 0 and at least
/// 0.05 between neighbours is enforced by `validate`.
struct JudgmentMapping {
  double big_decrease = -0.2;
  double decrease = -0.1;
  double same = 0.0;
  double increase = 0.1;
  double big_increase = 0.2;

  [[nodiscard]] double value(Judgment j) const noexcept;
};

inline constexpr double kMinJudgmentSeparation = 0.05;

void validate(const JudgmentMapping& mapping);

/// J_t = j_1 + ... + j_t.
MetricSeries absolute_curve(std::span<const Judgment> judgments, const JudgmentMapping& mapping = {});

/// Population z-score. Throws DegenerateError on fewer than two values or a
/// constant series.
MetricSeries zscore(const MetricSeries& series);
Vector zscore(std::span<const double> values);

enum class MeasurementLevel { Nominal, Ordinal, Interval };

/// units x coders; nullopt marks a missing value.
using ReliabilityTable = std::vector<std::vector<std::optional<double>>>;

/// Krippendorff's alpha from the coincidence matrix. Units with fewer than two
/// values are not pairable and are skipped. Throws DegenerateError when no
/// values are pairable or the expected disagreement is zero.
double krippendorff_alpha(const ReliabilityTable& table, MeasurementLevel level);
/// Sentences are units, annotators are coders, judgments are coded -2..2.
double krippendorff_alpha(const AnnotationSet& annotations, MeasurementLevel level);

struct CorrelationSummary {
  double tau = 0.0;
  double rho = 0.0;
  std::size_t pairs_used = 0;
  /// Pairs skipped because one side was constant.
  std::size_t pairs_skipped = 0;
};

/// Mean over annotators of Kendall tau-b and Spearman rho between the
/// z-scored prediction and each annotator's z-scored absolute curve.
CorrelationSummary pairwise_correlation(const MetricSeries& prediction, const AnnotationSet& annotations,
                                        const JudgmentMapping& mapping = {});

/// Mean correlation over unordered annotator pairs.
CorrelationSummary human_upper_bound(const AnnotationSet& annotations, const JudgmentMapping& mapping = {});

}  // namespace narr
