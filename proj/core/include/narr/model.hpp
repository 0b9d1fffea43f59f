#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "narr/vector_ops.hpp"

namespace narr {

// Variant names used by the salience measures. Traces may carry others.
inline constexpr const char* kVariantBase = "base";
inline constexpr const char* kVariantDeleted = "deleted";
inline constexpr const char* kVariantSwapped = "swapped";
inline constexpr const char* kVariantNoKnowledge = "no_knowledge";

struct ContinuationSample {
  Vector embedding;
  std::optional<double> raw_score;
  /// Sentiment of the imagined continuation, used by the weighted suspense.
  std::optional<double> sentiment;

  bool operator==(const ContinuationSample&) const = default;
};

/// Candidate next states `horizon` sentences ahead of the owning sentence.
struct ContinuationSet {
  int horizon = 1;
  std::vector<ContinuationSample> samples;
  std::optional<Vector> probabilities;

  [[nodiscard]] std::vector<Vector> embeddings() const;

  bool operator==(const ContinuationSet&) const = default;
};

struct SentenceRecord {
  std::size_t index = 0;
  std::optional<std::string> text;
  Vector embedding;
  /// Mean per-token log-likelihood of the sentence itself, in nats.
  std::optional<double> avg_log_likelihood;
  /// variant -> per-token log-likelihoods (nats) of the following window.
  std::map<std::string, Vector> window_token_loglikes;
  /// variant -> aggregate embedding of the following window.
  std::map<std::string, Vector> window_embedding;
  std::optional<double> sentiment;
  std::optional<ContinuationSet> continuations;

  bool operator==(const SentenceRecord&) const = default;
};

struct StoryTrace {
  std::string story_id;
  std::size_t embedding_dim = 0;
  std::map<std::string, std::string> meta;
  std::vector<SentenceRecord> sentences;

  [[nodiscard]] std::size_t size() const noexcept { return sentences.size(); }

  bool operator==(const StoryTrace&) const = default;
};

/// Throws ValidationError naming the offending field when an invariant fails.
void validate(const StoryTrace& trace);
void validate(const SentenceRecord& rec, std::size_t embedding_dim);
void validate(const ContinuationSet& cont, std::size_t embedding_dim);

/// Checks a probability vector: non-negative entries summing to 1 within `tol`.
bool is_probability_vector(const Vector& p, double tol = 1e-9) noexcept;

/// A named per-sentence curve.
struct MetricSeries {
  std::string name;
  Vector values;
  bool normalized = false;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }

  bool operator==(const MetricSeries&) const = default;
};

// ---------------------------------------------------------------------------
// Annotations

enum class Judgment { BigDecrease, Decrease, Same, Increase, BigIncrease };

/// -2 .. +2, the ordinal position of a judgment.
int ordinal(Judgment j) noexcept;
std::string_view to_token(Judgment j) noexcept;
/// BD, D, S, I, BI; NA is read as Same. Throws ValidationError otherwise.
Judgment judgment_from_token(std::string_view token);

struct AnnotationSet {
  std::string story_id;
  std::map<std::string, std::vector<Judgment>> annotators;

  bool operator==(const AnnotationSet&) const = default;
};

/// Every annotator must have `n_sentences` judgments (pass 0 to only check consistency).
void validate(const AnnotationSet& annotations, std::size_t n_sentences = 0);

// ---------------------------------------------------------------------------
// Gold labels

enum class GoldKind { Salience, TurningPoints };

struct IndexRange {
  std::size_t lo = 0;
  std::size_t hi = 0;  // inclusive

  bool operator==(const IndexRange&) const = default;
};

inline constexpr std::size_t kTurningPointCount = 5;

struct GoldLabels {
  GoldKind kind = GoldKind::Salience;
  std::string story_id;
  std::size_t story_length = 0;
  std::set<std::size_t> salient_indices;
  std::vector<std::size_t> tp_positions;
  std::optional<std::vector<IndexRange>> tp_windows;

  bool operator==(const GoldLabels&) const = default;
};

void validate(const GoldLabels& gold);

}  // namespace narr
