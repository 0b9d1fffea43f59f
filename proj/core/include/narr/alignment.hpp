#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "narr/model.hpp"

namespace narr {

/// Summary-to-text alignment parameters.
struct AlignConfig {
  double window_fraction = 0.10;  ///< relative-position window
  double min_similarity = 0.35;
  double slack = 0.05;  ///< candidates must be within `slack` of the window's best
  std::size_t max_matches = 3;
};

void validate(const AlignConfig& cfg);

struct AlignmentMatch {
  std::size_t summary_index = 0;
  std::size_t fulltext_index = 0;
  double similarity = 0.0;

  bool operator==(const AlignmentMatch&) const = default;
};

struct AlignmentResult {
  GoldLabels labels;
  std::vector<AlignmentMatch> matches;
  /// Summary sentences whose position window contained no full-text sentence.
  std::size_t empty_windows = 0;
};

/// Labels full-text sentences that align to summary sentences.
///
/// For summary sentence x the candidates are full-text sentences y with
/// |y/|F| - x/|S|| <= window_fraction. Let m be the best cosine similarity in
/// the window; up to `max_matches` candidates with similarity >= min_similarity
/// and >= m - slack are kept, best first (earlier y on ties). The salient set
/// is the union over summary sentences.
AlignmentResult align(std::span<const Vector> summary, std::span<const Vector> fulltext, const AlignConfig& cfg = {});

struct AlignmentReport {
  std::size_t sentences = 0;
  std::size_t labelled = 0;
  double coverage = 0.0;
};

AlignmentReport alignment_report(const GoldLabels& labels, std::size_t fulltext_length);

}  // namespace narr
