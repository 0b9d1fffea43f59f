#include "narr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "narr/error.hpp"
#include "narr/tokenize.hpp"

namespace narr {

DistanceKind distance_kind_from_string(std::string_view name) {
  if (name == "l1") return DistanceKind::L1;
  if (name == "l2") return DistanceKind::L2;
  if (name == "sql2" || name == "squared_l2") return DistanceKind::SquaredL2;
  if (name == "cos" || name == "cosine") return DistanceKind::Cosine;
  throw ValidationError("unknown distance '" + std::string(name) + "' (expected l1, l2, sql2, cosine)");
}

std::string_view to_string(DistanceKind kind) noexcept {
  switch (kind) {
    case DistanceKind::L1: return "l1";
    case DistanceKind::L2: return "l2";
    case DistanceKind::SquaredL2: return "sql2";
    case DistanceKind::Cosine: return "cosine";
  }
  return "sql2";
}

void validate(const MetricConfig& cfg) {
  if (cfg.horizon < 1) throw ValidationError("horizon must be >= 1");
  if (!(cfg.alpha_pos_weight >= 0.0) || !(cfg.alpha_neg_weight >= 0.0)) {
    throw ValidationError("alpha weights must be non-negative");
  }
}

double distance(std::span<const double> a, std::span<const double> b, DistanceKind kind) {
  if (a.size() != b.size()) {
    throw ValidationError("distance: length mismatch " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
  switch (kind) {
    case DistanceKind::L1: {
      double acc = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
      return acc;
    }
    case DistanceKind::L2:
    case DistanceKind::SquaredL2: {
      double acc = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
      }
      return kind == DistanceKind::L2 ? std::sqrt(acc) : acc;
    }
    case DistanceKind::Cosine:
      return std::max(0.0, 1.0 - cosine_similarity(a, b));
  }
  return 0.0;
}

double hale_surprise(double p) {
  if (!(p > 0.0) || p > 1.0) throw ValidationError("hale_surprise: probability must lie in (0, 1]");
  return -std::log(p);
}

double entropy(std::span<const double> dist) {
  double sum = 0.0;
  double h = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("entropy: negative or non-finite probability");
    sum += p;
    if (p > 0.0) h -= p * std::log(p);
  }
  if (dist.empty() || std::abs(sum - 1.0) > 1e-9) throw ValidationError("entropy: input is not a distribution");
  return std::max(0.0, h);
}

Vector softmax(std::span<const double> scores) {
  if (scores.empty()) throw ValidationError("softmax of an empty score vector");
  const double top = *std::max_element(scores.begin(), scores.end());
  Vector out(scores.size());
  double z = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - top);
    z += out[i];
  }
  for (double& v : out) v /= z;
  return out;
}

Vector continuation_distribution(std::span<const double> state, std::span<const Vector> continuations,
                                 Similarity sim) {
  if (continuations.empty()) throw ValidationError("continuation_distribution: no continuations");
  Vector scores;
  scores.reserve(continuations.size());
  for (const auto& c : continuations) {
    scores.push_back(sim == Similarity::Cosine ? cosine_similarity(state, c) : dot(state, c));
  }
  return softmax(scores);
}

Vector resolve_probabilities(std::span<const double> state, const ContinuationSet& cont, Similarity sim) {
  if (cont.probabilities) return *cont.probabilities;
  const bool all_scored = std::all_of(cont.samples.begin(), cont.samples.end(),
                                      [](const ContinuationSample& s) { return s.raw_score.has_value(); });
  if (all_scored && !cont.samples.empty()) {
    Vector scores;
    for (const auto& s : cont.samples) scores.push_back(*s.raw_score);
    return softmax(scores);
  }
  const auto embs = cont.embeddings();
  return continuation_distribution(state, embs, sim);
}

double ely_suspense(std::span<const double> state, std::span<const Vector> continuations,
                    std::span<const double> probabilities, DistanceKind kind) {
  if (continuations.empty()) throw ValidationError("ely_suspense: no continuations");
  if (probabilities.size() != continuations.size()) {
    throw ValidationError("ely_suspense: probability count differs from continuation count");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < continuations.size(); ++i) {
    acc += probabilities[i] * distance(state, continuations[i], kind);
  }
  return acc;
}

double ely_suspense(std::span<const double> state, const ContinuationSet& cont, DistanceKind kind, Similarity sim) {
  const auto probs = resolve_probabilities(state, cont, sim);
  const auto embs = cont.embeddings();
  return ely_suspense(state, embs, probs, kind);
}

double alpha_weight(double sentiment, const MetricConfig& cfg) {
  if (!(sentiment >= -1.0) || sentiment > 1.0) throw ValidationError("alpha_weight: sentiment outside [-1, 1]");
  const double weight = sentiment >= 0.0 ? cfg.alpha_pos_weight : cfg.alpha_neg_weight;
  const double scaled = weight * std::abs(sentiment);
  return cfg.alpha_floor ? 1.0 + scaled : scaled;
}

double weighted_surprise(double alpha, double surprise) {
  if (!(alpha >= 0.0)) throw ValidationError("weighted_surprise: alpha must be non-negative");
  return alpha * surprise;
}

double weighted_suspense(std::span<const double> state, std::span<const Vector> continuations,
                         std::span<const double> probabilities, std::span<const double> alphas,
                         DistanceKind kind) {
  if (continuations.empty()) throw ValidationError("weighted_suspense: no continuations");
  if (probabilities.size() != continuations.size() || alphas.size() != continuations.size()) {
    throw ValidationError("weighted_suspense: probabilities/alphas/continuations differ in length");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < continuations.size(); ++i) {
    if (!(alphas[i] >= 0.0)) throw ValidationError("weighted_suspense: alpha must be non-negative");
    acc += probabilities[i] * alphas[i] * distance(state, continuations[i], kind);
  }
  return acc;
}

double sample_ely_suspense(std::span<const double> state, std::span<const Vector> samples, DistanceKind kind) {
  if (samples.empty()) throw ValidationError("sample_ely_suspense: no samples");
  double acc = 0.0;
  for (const auto& s : samples) acc += distance(state, s, kind);
  return acc / static_cast<double>(samples.size());
}

double sample_ely_surprise(std::span<const double> actual, std::span<const Vector> samples, DistanceKind kind) {
  if (samples.empty()) throw ValidationError("sample_ely_surprise: no samples");
  const auto centre = mean_vector(samples);
  return distance(actual, centre, kind);
}

double jaccard_similarity(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) throw ValidationError("jaccard_similarity: both token sets are empty");
  std::size_t common = 0;
  for (const auto& t : a) common += b.count(t);
  const std::size_t uni = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

double embedding_cosine_baseline(std::span<const double> a, std::span<const double> b) {
  return cosine_similarity(a, b);
}

double perplexity(double avg_nll) noexcept { return std::exp(avg_nll); }

double median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median of an empty set");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// ---------------------------------------------------------------------------

namespace {

using SentenceFn = std::function<std::optional<double>(const StoryTrace&, std::size_t, const MetricConfig&)>;

const ContinuationSet* continuations_at(const StoryTrace& trace, std::size_t t, int horizon) {
  const auto& rec = trace.sentences[t];
  if (!rec.continuations || rec.continuations->horizon != horizon) return nullptr;
  return &*rec.continuations;
}

std::optional<std::size_t> back(std::size_t t, int horizon) {
  const auto h = static_cast<std::size_t>(horizon);
  if (t < h) return std::nullopt;
  return t - h;
}

std::optional<double> alpha_at(const StoryTrace& trace, std::size_t t, const MetricConfig& cfg) {
  const auto& s = trace.sentences[t].sentiment;
  if (!s) return std::nullopt;
  return alpha_weight(*s, cfg);
}

// Per-sample alphas: each sample's own sentiment, falling back to the realized
// sentence `horizon` steps ahead.
std::optional<Vector> sample_alphas(const StoryTrace& trace, std::size_t t, const ContinuationSet& cont,
                                    const MetricConfig& cfg) {
  std::optional<double> realized;
  const auto ahead = t + static_cast<std::size_t>(cont.horizon);
  if (ahead < trace.size()) realized = alpha_at(trace, ahead, cfg);
  Vector out;
  for (const auto& s : cont.samples) {
    if (s.sentiment) {
      out.push_back(alpha_weight(*s.sentiment, cfg));
    } else if (realized) {
      out.push_back(*realized);
    } else {
      return std::nullopt;
    }
  }
  return out;
}

std::optional<double> ely_surprise_at(const StoryTrace& trace, std::size_t t, const MetricConfig& cfg) {
  const auto prev = back(t, cfg.horizon);
  if (!prev) return std::nullopt;
  return ely_surprise(trace.sentences[t].embedding, trace.sentences[*prev].embedding, cfg.distance);
}

std::optional<double> ely_suspense_at(const StoryTrace& trace, std::size_t t, const MetricConfig& cfg) {
  const auto* cont = continuations_at(trace, t, cfg.horizon);
  if (!cont) return std::nullopt;
  return ely_suspense(trace.sentences[t].embedding, *cont, cfg.distance, cfg.similarity_for_probs);
}

std::optional<double> alpha_ely_surprise_at(const StoryTrace& trace, std::size_t t, const MetricConfig& cfg) {
  const auto s = ely_surprise_at(trace, t, cfg);
  const auto a = alpha_at(trace, t, cfg);
  if (!s || !a) return std::nullopt;
  return weighted_surprise(*a, *s);
}

std::optional<double> alpha_ely_suspense_at(const StoryTrace& trace, std::size_t t, const MetricConfig& cfg) {
  const auto* cont = continuations_at(trace, t, cfg.horizon);
  if (!cont) return std::nullopt;
  const auto alphas = sample_alphas(trace, t, *cont, cfg);
  if (!alphas) return std::nullopt;
  const auto& state = trace.sentences[t].embedding;
  const auto probs = resolve_probabilities(state, *cont, cfg.similarity_for_probs);
  const auto embs = cont->embeddings();
  return weighted_suspense(state, embs, probs, *alphas, cfg.distance);
}

std::optional<double> sample_suspense_at(const StoryTrace& trace, std::size_t t, const MetricConfig& cfg) {
  const auto* cont = continuations_at(trace, t, cfg.horizon);
  if (!cont) return std::nullopt;
  const auto embs = cont->embeddings();
  return sample_ely_suspense(trace.sentences[t].embedding, embs, cfg.distance);
}

std::optional<double> sample_surprise_at(const StoryTrace& trace, std::size_t t, const MetricConfig& cfg) {
  const auto prev = back(t, cfg.horizon);
  if (!prev) return std::nullopt;
  const auto* cont = continuations_at(trace, *prev, cfg.horizon);
  if (!cont) return std::nullopt;
  const auto embs = cont->embeddings();
  return sample_ely_surprise(trace.sentences[t].embedding, embs, cfg.distance);
}

// Probability of the realized sentence among {realized} + the candidates the
// earlier sentence imagined, by similarity softmax from the earlier state.
std::optional<double> hale_surprise_at(const StoryTrace& trace, std::size_t t, const MetricConfig& cfg) {
  const auto prev = back(t, cfg.horizon);
  if (!prev) return std::nullopt;
  const auto* cont = continuations_at(trace, *prev, cfg.horizon);
  if (!cont) return std::nullopt;
  std::vector<Vector> candidates;
  candidates.reserve(cont->samples.size() + 1);
  candidates.push_back(trace.sentences[t].embedding);
  for (const auto& s : cont->samples) candidates.push_back(s.embedding);
  const auto probs = continuation_distribution(trace.sentences[*prev].embedding, candidates, cfg.similarity_for_probs);
  return hale_surprise(probs.front());
}

std::optional<double> entropy_at(const StoryTrace& trace, std::size_t t, const MetricConfig& cfg) {
  const auto* cont = continuations_at(trace, t, cfg.horizon);
  if (!cont) return std::nullopt;
  const auto probs = resolve_probabilities(trace.sentences[t].embedding, *cont, cfg.similarity_for_probs);
  return entropy(probs);
}

std::optional<double> hale_reduction_at(const StoryTrace& trace, std::size_t t, const MetricConfig& cfg) {
  if (t == 0) return std::nullopt;
  const auto prev = entropy_at(trace, t - 1, cfg);
  const auto curr = entropy_at(trace, t, cfg);
  if (!prev || !curr) return std::nullopt;
  return hale_uncertainty_reduction(*prev, *curr);
}

std::optional<double> word_overlap_at(const StoryTrace& trace, std::size_t t, const MetricConfig&) {
  if (t == 0) return std::nullopt;
  const auto& a = trace.sentences[t].text;
  const auto& b = trace.sentences[t - 1].text;
  if (!a || !b) return std::nullopt;
  const auto ta = token_set(*a);
  const auto tb = token_set(*b);
  if (ta.empty() && tb.empty()) return std::nullopt;
  return jaccard_similarity(ta, tb);
}

std::optional<double> embedding_similarity_at(const StoryTrace& trace, std::size_t t, const MetricConfig&) {
  if (t == 0) return std::nullopt;
  return embedding_cosine_baseline(trace.sentences[t].embedding, trace.sentences[t - 1].embedding);
}

std::optional<double> perplexity_at(const StoryTrace& trace, std::size_t t, const MetricConfig&) {
  const auto& ll = trace.sentences[t].avg_log_likelihood;
  if (!ll) return std::nullopt;
  return perplexity(-*ll);
}

struct NamedMetric {
  std::string name;
  SentenceFn fn;
  // Metrics that become alpha-weighted when MetricConfig::alpha_enabled is set.
  SentenceFn alpha_fn;
};

const std::vector<NamedMetric>& registry() {
  static const std::vector<NamedMetric> metrics = {
      {"hale_surprise", hale_surprise_at, nullptr},
      {"hale_entropy", entropy_at, nullptr},
      {"hale_uncertainty_reduction", hale_reduction_at, nullptr},
      {"ely_surprise", ely_surprise_at, alpha_ely_surprise_at},
      {"ely_suspense", ely_suspense_at, alpha_ely_suspense_at},
      {"alpha_ely_surprise", alpha_ely_surprise_at, nullptr},
      {"alpha_ely_suspense", alpha_ely_suspense_at, nullptr},
      {"sample_ely_suspense", sample_suspense_at, nullptr},
      {"sample_ely_surprise", sample_surprise_at, nullptr},
      {"word_overlap", word_overlap_at, nullptr},
      {"embedding_similarity", embedding_similarity_at, nullptr},
      {"sentiment_alpha", alpha_at, nullptr},
      {"perplexity", perplexity_at, nullptr},
  };
  return metrics;
}

}  // namespace

const std::vector<std::string>& suspense_metric_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& m : registry()) out.push_back(m.name);
    return out;
  }();
  return names;
}

MetricSeries metric_series(const StoryTrace& trace, std::string_view metric, const MetricConfig& cfg) {
  validate(cfg);
  const auto& reg = registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const NamedMetric& m) { return m.name == metric; });
  if (it == reg.end()) throw ValidationError("unknown metric '" + std::string(metric) + "'");
  const auto& fn = (cfg.alpha_enabled && it->alpha_fn) ? it->alpha_fn : it->fn;

  MetricSeries series;
  series.name = std::string(metric);
  series.values.assign(trace.size(), 0.0);
  std::size_t computed = 0;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    if (const auto v = fn(trace, t, cfg)) {
      series.values[t] = *v;
      ++computed;
    }
  }
  if (computed == 0) {
    throw MissingInputError("metric '" + series.name + "': no sentence of story '" + trace.story_id +
                            "' carries the required inputs");
  }
  return series;
}

}  // namespace narr
