#pragma once

#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "narr/model.hpp"

namespace narr {

enum class DistanceKind { L1, L2, SquaredL2, Cosine };
enum class Similarity { Cosine, Dot };

DistanceKind distance_kind_from_string(std::string_view name);
std::string_view to_string(DistanceKind kind) noexcept;

struct MetricConfig {
  DistanceKind distance = DistanceKind::SquaredL2;
  Similarity similarity_for_probs = Similarity::Cosine;
  int horizon = 1;
  bool alpha_enabled = false;
  double alpha_pos_weight = 1.0;
  double alpha_neg_weight = 2.0;
  /// Adds 1 to the sentiment factor so neutral sentences keep their base
  /// value. Off by default: alpha is |s| times the polarity weight.
  bool alpha_floor = false;
};

void validate(const MetricConfig& cfg);

/// Non-negative distance. Cosine distance is 1 - cos and needs non-zero inputs.
double distance(std::span<const double> a, std::span<const double> b, DistanceKind kind);

/// -ln p for p in (0, 1].
double hale_surprise(double p);

/// Shannon entropy in nats; 0 ln 0 is 0.
double entropy(std::span<const double> dist);

/// H_{t-1} - H_t. Negative when uncertainty grows.
inline double hale_uncertainty_reduction(double h_prev, double h_curr) noexcept { return h_prev - h_curr; }

/// Max-shifted softmax.
Vector softmax(std::span<const double> scores);

/// Softmax over the similarity between `state` and each continuation.
Vector continuation_distribution(std::span<const double> state, std::span<const Vector> continuations,
                                 Similarity sim);

/// Probabilities for a continuation set: stored probabilities if present,
/// else a softmax over raw scores when every sample has one, else
/// `continuation_distribution` against `state`.
Vector resolve_probabilities(std::span<const double> state, const ContinuationSet& cont, Similarity sim);

/// Distance from the previous state to the current one.
inline double ely_surprise(std::span<const double> current, std::span<const double> previous, DistanceKind kind) {
  return distance(current, previous, kind);
}

/// Probability-weighted expected distance to the continuations.
double ely_suspense(std::span<const double> state, std::span<const Vector> continuations,
                    std::span<const double> probabilities, DistanceKind kind);
double ely_suspense(std::span<const double> state, const ContinuationSet& cont, DistanceKind kind,
                    Similarity sim = Similarity::Cosine);

/// |s| scaled by the positive or negative polarity weight.
double alpha_weight(double sentiment, const MetricConfig& cfg);

/// alpha * surprise; alpha must be non-negative.
double weighted_surprise(double alpha, double surprise);
/// sum_i P_i * alpha_i * d(state, e_i).
double weighted_suspense(std::span<const double> state, std::span<const Vector> continuations,
                         std::span<const double> probabilities, std::span<const double> alphas,
                         DistanceKind kind);

/// Mean distance from `state` to equally weighted samples.
double sample_ely_suspense(std::span<const double> state, std::span<const Vector> samples, DistanceKind kind);
/// Distance from `actual` to the componentwise mean of the samples.
double sample_ely_surprise(std::span<const double> actual, std::span<const Vector> samples, DistanceKind kind);

/// Jaccard similarity of two token sets.
double jaccard_similarity(const std::set<std::string>& a, const std::set<std::string>& b);
double embedding_cosine_baseline(std::span<const double> a, std::span<const double> b);

/// exp(avg_nll).
double perplexity(double avg_nll) noexcept;
/// Median (mean of the middle pair for even counts); throws on empty input.
double median(std::vector<double> values);

/// Names accepted by `metric_series`.
const std::vector<std::string>& suspense_metric_names();

/// Per-sentence curve for a named metric. Sentences lacking the inputs the
/// metric needs (sentence 0 for backward-looking metrics, a sentence without
/// continuations for forward-looking ones) are reported as 0. Throws
/// ValidationError for an unknown name and MissingInputError when no sentence
/// has the inputs.
MetricSeries metric_series(const StoryTrace& trace, std::string_view metric, const MetricConfig& cfg);

}  // namespace narr
