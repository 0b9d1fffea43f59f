#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "narr/model.hpp"

namespace narr {

enum class SalienceMeasure { Like, Swap, KnowDiff, EmbSurp, EmbSal, Clus, Random, Ascending, Descending };

SalienceMeasure salience_measure_from_string(std::string_view name);
std::string_view to_string(SalienceMeasure m) noexcept;
const std::vector<std::string>& salience_measure_names();

struct SalienceConfig {
  /// Window length (LM word pieces) the trace producer should use; salience
  /// itself only checks that windows are present.
  std::size_t window_tokens = 128;
  SalienceMeasure measure = SalienceMeasure::Like;
  bool imp_adjust = false;
  bool combine_like_clus = false;
  std::size_t clus_per = 10;
  std::uint64_t rng_seed = 0;
};

void validate(const SalienceConfig& cfg);

/// Length-normalized log-likelihood of a window (nats per token).
double coherence(std::span<const double> token_loglikes);

/// c_base - c_variant: positive when changing the sentence hurts prediction.
inline double bcf_salience(double c_base, double c_variant) noexcept { return c_base - c_variant; }

// Record-level measures. Each throws MissingInputError when a variant is absent.
double like_salience(const SentenceRecord& rec);
double swap_salience(const SentenceRecord& rec);
double knowledge_salience(const SentenceRecord& rec);
double emb_salience(const SentenceRecord& rec);

/// Cosine distance between consecutive sentence embeddings.
double emb_surprise(std::span<const double> current, std::span<const double> previous);

/// salience * (1 + |sentiment|).
double imp_adjust(double salience, double sentiment);

struct KMeansResult {
  std::vector<std::size_t> assignment;
  std::vector<Vector> centroids;
  int iterations = 0;
};

/// Lloyd's k-means over unit-normalized vectors with cosine assignment
/// (lowest cluster index on ties). Deterministic: seeds are k evenly spaced
/// points in input order; at most 100 iterations, stopping once no centroid
/// moves more than 1e-9.
KMeansResult spherical_kmeans(std::span<const Vector> embeddings, std::size_t k);

/// Negated cosine distance to the assigned centroid, k = ceil(n / clus_per).
MetricSeries clus_salience(std::span<const Vector> embeddings, const SalienceConfig& cfg);

/// z(clus) + 2 z(like); a constant input contributes zeros.
MetricSeries combine_like_clus(const MetricSeries& like, const MetricSeries& clus);

enum class PositionalKind { Random, Ascending, Descending };
MetricSeries positional_baseline(std::size_t n, PositionalKind kind, std::uint64_t seed = 0);

/// Per-sentence salience for `cfg.measure` over a trace, applying the
/// Imp adjustment (missing sentiment counts as neutral) and the Like+Clus
/// combination when configured. Sentences without inputs for the measure
/// score 0.
MetricSeries salience_series(const StoryTrace& trace, const SalienceConfig& cfg);

}  // namespace narr
