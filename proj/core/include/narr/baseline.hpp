#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "narr/model.hpp"

namespace narr {

/// Deterministic hashed bag-of-tokens projection.
struct HashEmbedder {
  std::size_t dim = 64;
  std::uint64_t seed = 0;

  /// Fixed pseudo-random direction for one token (not normalized).
  [[nodiscard]] Vector token_vector(std::string_view token) const;
  /// Sum of token vectors over `tokens`, unit normalized. Throws
  /// ValidationError when there are no tokens.
  [[nodiscard]] Vector embed_tokens(const std::vector<std::string>& tokens) const;
};

/// Tokenizes then embeds; throws ValidationError on text without tokens.
Vector embed(std::string_view text, const HashEmbedder& embedder);

/// Bigram counts accumulated from a reading context.
struct BigramCounts {
  std::map<std::pair<std::string, std::string>, std::uint64_t> pairs;
  std::unordered_map<std::string, std::uint64_t> histories;

  void add(const std::string& prev, const std::string& next);
  /// Adds every bigram of `tokens`, the first one conditioned on `prev`.
  void add_sequence(const std::vector<std::string>& tokens, const std::string& prev);
};

inline constexpr const char* kSentenceStart = "<s>";

/// Add-one smoothed unigram or bigram model over a closed vocabulary.
///
/// Unigram: P(w) = (c(w) + 1) / (N + V). Bigram: P(w | u) =
/// (c(u, w) + k(u, w) + 1) / (c(u) + k(u) + V) where c are training counts,
/// k the optional reading-context counts and c(u) counts bigrams leaving u.
/// A unigram model ignores the reading context.
class NgramLM {
 public:
  explicit NgramLM(int order);

  /// Adds tokens to the vocabulary without counting them.
  void add_vocabulary(const std::vector<std::string>& tokens);
  /// Counts a training sequence (bigrams start from the sentence-start symbol).
  void train(const std::vector<std::string>& tokens);

  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] std::size_t vocabulary_size() const noexcept { return vocab_.size(); }
  [[nodiscard]] std::uint64_t token_count() const noexcept { return total_; }
  [[nodiscard]] const std::map<std::string, std::uint64_t>& vocabulary() const noexcept { return vocab_; }

  [[nodiscard]] double probability(const std::string& token, const std::string& prev,
                                   const BigramCounts* context = nullptr) const;
  [[nodiscard]] double log_probability(const std::string& token, const std::string& prev,
                                       const BigramCounts* context = nullptr) const;
  /// Context-free unigram view, available at either order.
  [[nodiscard]] double unigram_probability(const std::string& token) const;

 private:
  int order_;
  std::map<std::string, std::uint64_t> vocab_;  // token -> unigram count
  std::uint64_t total_ = 0;
  BigramCounts bigrams_;
};

/// Per-token log-likelihoods (nats), each token conditioned on its
/// predecessor; the first on `prev` (the sentence-start symbol by default).
Vector lm_loglik(const std::vector<std::string>& tokens, const NgramLM& lm, const BigramCounts* context = nullptr,
                 const std::string& prev = kSentenceStart);

/// Valence in [-1, 1] from a small polarity lexicon, x / sqrt(x^2 + 15) with
/// x = positive hits - negative hits.
double lexicon_sentiment(const std::vector<std::string>& tokens);

struct BuildOptions {
  std::size_t window_tokens = 128;
  /// Weight of the previous state in the running sentence state.
  double context_decay = 0.5;
  /// Sentences from elsewhere in the corpus to draw continuations from.
  std::vector<std::string> continuation_pool;
  std::size_t continuations_per_sentence = 8;
  std::uint64_t seed = 0;
};

/// Builds a complete trace. Sentence states are running normalized sums
/// h_t + decay * state_{t-1}. The window of sentence t is the next
/// `window_tokens` tokens; its variants condition the LM on the prefix up to
/// and including t ("base"), without t ("deleted"), with t and t-1 swapped
/// ("swapped"), and a context-free unigram view ("no_knowledge").
StoryTrace build_trace(std::string story_id, const std::vector<std::string>& sentences, const HashEmbedder& embedder,
                       const NgramLM& lm, const BuildOptions& options = {});

}  // namespace narr
