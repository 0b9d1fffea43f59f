#include "narr/baseline.hpp"

#include <cmath>
#include <set>

#include "narr/error.hpp"
#include "narr/tokenize.hpp"
#include "narr/vector_ops.hpp"

namespace narr {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

const std::set<std::string>& positive_words() {
  static const std::set<std::string> words = {
      "good",   "happy",  "joy",   "love",   "loved",   "kind",    "safe",   "smile",  "smiled", "won",
      "win",    "hope",   "saved", "friend", "friends", "bright",  "warm",   "calm",   "gentle", "laughed",
      "proud",  "rescue", "peace", "glad",   "success", "treasure", "healed", "brave",  "free",   "celebrated"};
  return words;
}

const std::set<std::string>& negative_words() {
  static const std::set<std::string> words = {
      "bad",    "sad",   "fear",    "afraid", "angry",  "lost",   "dark",   "cold",    "cried", "hurt",
      "danger", "dead",  "died",    "storm",  "broken", "alone",  "attack", "trapped", "fell",  "scream",
      "screamed", "threat", "enemy", "fire",  "failed", "wounded", "panic", "terrible", "burned", "fled"};
  return words;
}

Vector mean_loglik_window(const std::vector<std::string>& window, const NgramLM& lm, const BigramCounts* ctx,
                          const std::string& prev) {
  return lm_loglik(window, lm, ctx, prev);
}

Vector window_embedding(const std::vector<std::string>& window, std::span<const double> loglikes,
                        const HashEmbedder& embedder) {
  Vector acc(embedder.dim, 0.0);
  for (std::size_t i = 0; i < window.size(); ++i) {
    const auto v = embedder.token_vector(window[i]);
    const double w = -loglikes[i];
    for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += w * v[d];
  }
  return normalized(acc);
}

const std::string& last_or_start(const std::vector<std::vector<std::string>>& toks, std::ptrdiff_t i) {
  static const std::string start = kSentenceStart;
  return i < 0 ? start : toks[static_cast<std::size_t>(i)].back();
}

// Bigram counts of the concatenation of the given sentences, read in order
// from the sentence-start symbol.
BigramCounts prefix_counts(const std::vector<std::vector<std::string>>& toks, const std::vector<std::size_t>& order) {
  BigramCounts c;
  std::string prev = kSentenceStart;
  for (const auto i : order) {
    c.add_sequence(toks[i], prev);
    prev = toks[i].back();
  }
  return c;
}

}  // namespace

Vector HashEmbedder::token_vector(std::string_view token) const {
  std::uint64_t state = fnv1a(token) ^ (seed * 0xd1b54a32d192ed03ULL);
  Vector v(dim);
  for (auto& x : v) x = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  return v;
}

Vector HashEmbedder::embed_tokens(const std::vector<std::string>& tokens) const {
  if (dim < 2) throw ValidationError("embedder dimension must be at least 2");
  if (tokens.empty()) throw ValidationError("cannot embed text with zero tokens");
  Vector acc(dim, 0.0);
  for (const auto& t : tokens) {
    const auto v = token_vector(t);
    for (std::size_t d = 0; d < dim; ++d) acc[d] += v[d];
  }
  if (is_zero(acc)) throw DegenerateError("token vectors cancelled to zero");
  return normalized(acc);
}

Vector embed(std::string_view text, const HashEmbedder& embedder) { return embedder.embed_tokens(tokenize(text)); }

void BigramCounts::add(const std::string& prev, const std::string& next) {
  ++pairs[{prev, next}];
  ++histories[prev];
}

void BigramCounts::add_sequence(const std::vector<std::string>& tokens, const std::string& prev) {
  const std::string* p = &prev;
  for (const auto& t : tokens) {
    add(*p, t);
    p = &t;
  }
}

NgramLM::NgramLM(int order) : order_(order) {
  if (order != 1 && order != 2) throw ValidationError("n-gram order must be 1 or 2");
}

void NgramLM::add_vocabulary(const std::vector<std::string>& tokens) {
  for (const auto& t : tokens) vocab_.try_emplace(t, 0);
}

void NgramLM::train(const std::vector<std::string>& tokens) {
  for (const auto& t : tokens) {
    ++vocab_[t];
    ++total_;
  }
  if (!tokens.empty()) bigrams_.add_sequence(tokens, kSentenceStart);
}

double NgramLM::unigram_probability(const std::string& token) const {
  const auto v = static_cast<double>(vocab_.size());
  if (vocab_.empty()) throw ValidationError("language model has an empty vocabulary");
  const auto it = vocab_.find(token);
  const double c = it == vocab_.end() ? 0.0 : static_cast<double>(it->second);
  return (c + 1.0) / (static_cast<double>(total_) + v);
}

double NgramLM::probability(const std::string& token, const std::string& prev, const BigramCounts* context) const {
  if (order_ == 1) return unigram_probability(token);
  if (vocab_.empty()) throw ValidationError("language model has an empty vocabulary");
  auto lookup = [&](const BigramCounts& b, double& pair, double& hist) {
    if (const auto it = b.pairs.find({prev, token}); it != b.pairs.end()) pair += static_cast<double>(it->second);
    if (const auto it = b.histories.find(prev); it != b.histories.end()) hist += static_cast<double>(it->second);
  };
  double pair = 0.0;
  double hist = 0.0;
  lookup(bigrams_, pair, hist);
  if (context != nullptr) lookup(*context, pair, hist);
  return (pair + 1.0) / (hist + static_cast<double>(vocab_.size()));
}

double NgramLM::log_probability(const std::string& token, const std::string& prev, const BigramCounts* context) const {
  return std::log(probability(token, prev, context));
}

Vector lm_loglik(const std::vector<std::string>& tokens, const NgramLM& lm, const BigramCounts* context,
                 const std::string& prev) {
  if (tokens.empty()) throw ValidationError("lm_loglik: empty token sequence");
  Vector out;
  out.reserve(tokens.size());
  const std::string* p = &prev;
  for (const auto& t : tokens) {
    out.push_back(lm.log_probability(t, *p, context));
    p = &t;
  }
  return out;
}

double lexicon_sentiment(const std::vector<std::string>& tokens) {
  double x = 0.0;
  for (const auto& t : tokens) {
    if (positive_words().count(t) != 0) x += 1.0;
    if (negative_words().count(t) != 0) x -= 1.0;
  }
  return x / std::sqrt(x * x + 15.0);
}

StoryTrace build_trace(std::string story_id, const std::vector<std::string>& sentences, const HashEmbedder& embedder,
                       const NgramLM& lm, const BuildOptions& options) {
  if (sentences.size() < 2) throw ValidationError("build_trace: a story needs at least 2 sentences");
  if (options.window_tokens == 0) throw ValidationError("build_trace: window_tokens must be positive");

  std::vector<std::vector<std::string>> toks;
  toks.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    toks.push_back(tokenize(sentences[i]));
    if (toks.back().empty()) throw ValidationError("build_trace: sentence " + std::to_string(i) + " has no tokens");
  }

  NgramLM model = lm;
  for (const auto& t : toks) model.add_vocabulary(t);

  std::vector<std::vector<std::string>> pool;
  for (const auto& s : options.continuation_pool) {
    auto t = tokenize(s);
    if (!t.empty()) pool.push_back(std::move(t));
  }

  StoryTrace trace;
  trace.story_id = std::move(story_id);
  trace.embedding_dim = embedder.dim;
  trace.meta["provider"] = "baseline";
  trace.meta["lm_order"] = std::to_string(lm.order());
  trace.meta["window_tokens"] = std::to_string(options.window_tokens);

  const std::size_t n = toks.size();
  const auto ip = [](std::size_t i) { return static_cast<std::ptrdiff_t>(i); };
  Vector state;
  for (std::size_t t = 0; t < n; ++t) {
    SentenceRecord rec;
    rec.index = t;
    rec.text = sentences[t];

    const auto h = embedder.embed_tokens(toks[t]);
    if (state.empty()) {
      state = h;
    } else {
      Vector mix = h;
      for (std::size_t d = 0; d < mix.size(); ++d) mix[d] += options.context_decay * state[d];
      state = is_zero(mix) ? h : normalized(mix);
    }
    rec.embedding = state;
    rec.sentiment = lexicon_sentiment(toks[t]);

    std::vector<std::size_t> before(t);
    for (std::size_t i = 0; i < t; ++i) before[i] = i;
    const auto ctx_before = prefix_counts(toks, before);
    const auto own = lm_loglik(toks[t], model, &ctx_before, last_or_start(toks, ip(t) - 1));
    double sum = 0.0;
    for (const double v : own) sum += v;
    rec.avg_log_likelihood = sum / static_cast<double>(own.size());

    std::vector<std::string> window;
    for (std::size_t j = t + 1; j < n && window.size() < options.window_tokens; ++j) {
      for (const auto& w : toks[j]) {
        if (window.size() == options.window_tokens) break;
        window.push_back(w);
      }
    }
    if (!window.empty()) {
      auto add_variant = [&](const char* name, const Vector& ll) {
        rec.window_token_loglikes[name] = ll;
        rec.window_embedding[name] = window_embedding(window, ll, embedder);
      };
      auto with_t = before;
      with_t.push_back(t);
      const auto ctx_base = prefix_counts(toks, with_t);
      add_variant(kVariantBase, mean_loglik_window(window, model, &ctx_base, toks[t].back()));
      add_variant(kVariantDeleted, mean_loglik_window(window, model, &ctx_before, last_or_start(toks, ip(t) - 1)));
      if (t >= 1) {
        auto swapped = before;
        swapped.back() = t;
        swapped.push_back(t - 1);
        const auto ctx_swap = prefix_counts(toks, swapped);
        add_variant(kVariantSwapped, mean_loglik_window(window, model, &ctx_swap, toks[t - 1].back()));
      }
      Vector uni;
      uni.reserve(window.size());
      for (const auto& w : window) uni.push_back(std::log(model.unigram_probability(w)));
      add_variant(kVariantNoKnowledge, uni);
    }

    if (!pool.empty() && options.continuations_per_sentence > 0) {
      ContinuationSet cs;
      cs.horizon = 1;
      std::uint64_t rng = options.seed ^ fnv1a(trace.story_id) ^ (static_cast<std::uint64_t>(t) * 0x9e3779b97f4a7c15ULL);
      for (std::size_t k = 0; k < options.continuations_per_sentence; ++k) {
        const auto& sample = pool[splitmix64(rng) % pool.size()];
        Vector e = embedder.embed_tokens(sample);
        for (std::size_t d = 0; d < e.size(); ++d) e[d] += options.context_decay * state[d];
        ContinuationSample s;
        s.embedding = is_zero(e) ? embedder.embed_tokens(sample) : normalized(e);
        s.sentiment = lexicon_sentiment(sample);
        cs.samples.push_back(std::move(s));
      }
      rec.continuations = std::move(cs);
    }
    trace.sentences.push_back(std::move(rec));
  }
  validate(trace);
  return trace;
}

}  // namespace narr
