#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "narr/model.hpp"

namespace narr {

/// One generated story with its reference material.
struct SyntheticStory {
  std::string id;
  std::vector<std::string> sentences;
  /// Latent tension in [0, 1] the text and annotations were drawn from.
  Vector tension;
  /// Condensed retellings of the sentences in `summary_sources`, in order.
  std::vector<std::string> summary;
  std::vector<std::size_t> summary_sources;
  AnnotationSet annotations;
  GoldLabels turning_points;
  /// Set on the constructed story whose pivot introduces the window's bigrams.
  std::optional<std::size_t> pivot;
};

struct SyntheticCorpus {
  std::uint64_t seed = 0;
  std::vector<SyntheticStory> stories;
};

/// Deterministic template corpus: `story_count` generated stories followed by
/// the fixed pivot story (id "pivot").
SyntheticCorpus make_synthetic_corpus(std::uint64_t seed, std::size_t story_count = 6);

/// The fixed ten-sentence story whose sentence 3 alone introduces the bigrams
/// that dominate the rest of the text.
SyntheticStory pivot_story();

}  // namespace narr
