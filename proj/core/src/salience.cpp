#include "narr/salience.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>

#include "narr/error.hpp"
#include "narr/metrics.hpp"

namespace narr {

namespace {

struct MeasureName {
  SalienceMeasure measure;
  const char* name;
};

constexpr MeasureName kMeasureNames[] = {
    {SalienceMeasure::Like, "like"},           {SalienceMeasure::Swap, "swap"},
    {SalienceMeasure::KnowDiff, "know_diff"},  {SalienceMeasure::EmbSurp, "emb_surp"},
    {SalienceMeasure::EmbSal, "emb_sal"},      {SalienceMeasure::Clus, "clus"},
    {SalienceMeasure::Random, "random"},       {SalienceMeasure::Ascending, "ascending"},
    {SalienceMeasure::Descending, "descending"},
};

const Vector& require_variant(const std::map<std::string, Vector>& m, const char* variant, const SentenceRecord& rec,
                              const char* field) {
  const auto it = m.find(variant);
  if (it == m.end()) {
    throw MissingInputError("sentence " + std::to_string(rec.index) + ": " + field + "." + variant + " is absent");
  }
  return it->second;
}

double variant_salience(const SentenceRecord& rec, const char* variant) {
  const auto& base = require_variant(rec.window_token_loglikes, kVariantBase, rec, "win_ll");
  const auto& other = require_variant(rec.window_token_loglikes, variant, rec, "win_ll");
  return bcf_salience(coherence(base), coherence(other));
}

// Uniform double in [0, 1) from the top 53 bits; mt19937_64 output is
// standardized, so this is identical across standard libraries.
double unit_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

}  // namespace

SalienceMeasure salience_measure_from_string(std::string_view name) {
  for (const auto& m : kMeasureNames) {
    if (name == m.name) return m.measure;
  }
  throw ValidationError("unknown salience measure '" + std::string(name) + "'");
}

std::string_view to_string(SalienceMeasure measure) noexcept {
  for (const auto& m : kMeasureNames) {
    if (m.measure == measure) return m.name;
  }
  return "like";
}

const std::vector<std::string>& salience_measure_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& m : kMeasureNames) out.emplace_back(m.name);
    return out;
  }();
  return names;
}

void validate(const SalienceConfig& cfg) {
  if (cfg.window_tokens < 1) throw ValidationError("window_tokens must be >= 1");
  if (cfg.clus_per < 1) throw ValidationError("clus_per must be >= 1");
}

double coherence(std::span<const double> token_loglikes) {
  if (token_loglikes.empty()) throw ValidationError("coherence of an empty window");
  double sum = 0.0;
  for (double v : token_loglikes) sum += v;
  return sum / static_cast<double>(token_loglikes.size());
}

double like_salience(const SentenceRecord& rec) { return variant_salience(rec, kVariantDeleted); }
double swap_salience(const SentenceRecord& rec) { return variant_salience(rec, kVariantSwapped); }
double knowledge_salience(const SentenceRecord& rec) { return variant_salience(rec, kVariantNoKnowledge); }

double emb_salience(const SentenceRecord& rec) {
  const auto& base = require_variant(rec.window_embedding, kVariantBase, rec, "win_emb");
  const auto& del = require_variant(rec.window_embedding, kVariantDeleted, rec, "win_emb");
  return distance(base, del, DistanceKind::Cosine);
}

double emb_surprise(std::span<const double> current, std::span<const double> previous) {
  return distance(current, previous, DistanceKind::Cosine);
}

double imp_adjust(double salience, double sentiment) {
  if (!(sentiment >= -1.0) || sentiment > 1.0) throw ValidationError("imp_adjust: sentiment outside [-1, 1]");
  return salience * (1.0 + std::abs(sentiment));
}

// ---------------------------------------------------------------------------

namespace {

// Cosine similarity against a possibly zero centroid; a zero centroid is
// orthogonal to everything.
double centroid_similarity(const Vector& unit_point, const Vector& centroid) {
  const double n = l2_norm(centroid);
  if (n == 0.0) return 0.0;
  return std::clamp(dot(unit_point, centroid) / n, -1.0, 1.0);
}

std::vector<std::size_t> assign(const std::vector<Vector>& points, const std::vector<Vector>& centroids) {
  std::vector<std::size_t> out(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = centroid_similarity(points[i], centroids[0]);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
      const double s = centroid_similarity(points[i], centroids[c]);
      if (s > best) {
        best = s;
        out[i] = c;
      }
    }
  }
  return out;
}

}  // namespace

KMeansResult spherical_kmeans(std::span<const Vector> embeddings, std::size_t k) {
  if (embeddings.empty()) throw ValidationError("k-means over an empty set");
  if (k == 0) throw ValidationError("k-means needs k >= 1");
  const std::size_t n = embeddings.size();
  k = std::min(k, n);

  std::vector<Vector> points;
  points.reserve(n);
  for (const auto& e : embeddings) points.push_back(normalized(e));
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw ValidationError("k-means: embeddings differ in dimension");
  }

  KMeansResult r;
  for (std::size_t c = 0; c < k; ++c) r.centroids.push_back(points[c * n / k]);

  constexpr int kMaxIterations = 100;
  constexpr double kTolerance = 1e-9;
  for (r.iterations = 1; r.iterations <= kMaxIterations; ++r.iterations) {
    r.assignment = assign(points, r.centroids);
    std::vector<Vector> sums(k, Vector(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sums[r.assignment[i]];
      for (std::size_t d = 0; d < dim; ++d) s[d] += points[i][d];
      ++counts[r.assignment[i]];
    }
    double movement = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty clusters keep their centroid
      for (double& v : sums[c]) v /= static_cast<double>(counts[c]);
      movement = std::max(movement, distance(sums[c], r.centroids[c], DistanceKind::L2));
      r.centroids[c] = std::move(sums[c]);
    }
    if (movement <= kTolerance) break;
  }
  r.iterations = std::min(r.iterations, kMaxIterations);
  r.assignment = assign(points, r.centroids);
  return r;
}

MetricSeries clus_salience(std::span<const Vector> embeddings, const SalienceConfig& cfg) {
  validate(cfg);
  if (embeddings.empty()) throw ValidationError("clus_salience: no embeddings");
  const std::size_t k = (embeddings.size() + cfg.clus_per - 1) / cfg.clus_per;
  const auto km = spherical_kmeans(embeddings, k);
  MetricSeries out;
  out.name = "clus";
  out.values.reserve(embeddings.size());
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    const auto unit = normalized(embeddings[i]);
    const double dist = std::max(0.0, 1.0 - centroid_similarity(unit, km.centroids[km.assignment[i]]));
    out.values.push_back(dist == 0.0 ? 0.0 : -dist);
  }
  return out;
}

namespace {

Vector standardize_or_zero(const Vector& v) {
  const auto n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / n);
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  Vector out(v.size(), 0.0);
  if (sd == 0.0 || sd <= scale * 1e-14) return out;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - mean) / sd;
  return out;
}

}  // namespace

MetricSeries combine_like_clus(const MetricSeries& like, const MetricSeries& clus) {
  if (like.size() != clus.size()) throw ValidationError("combine_like_clus: series lengths differ");
  if (like.size() == 0) throw ValidationError("combine_like_clus: empty series");
  const auto zl = standardize_or_zero(like.values);
  const auto zc = standardize_or_zero(clus.values);
  MetricSeries out;
  out.name = "like_clus";
  out.normalized = true;
  out.values.resize(like.size());
  for (std::size_t i = 0; i < like.size(); ++i) out.values[i] = zc[i] + 2.0 * zl[i];
  return out;
}

MetricSeries positional_baseline(std::size_t n, PositionalKind kind, std::uint64_t seed) {
  MetricSeries out;
  out.values.resize(n);
  switch (kind) {
    case PositionalKind::Ascending:
      out.name = "ascending";
      for (std::size_t i = 0; i < n; ++i) out.values[i] = static_cast<double>(i);
      break;
    case PositionalKind::Descending:
      out.name = "descending";
      for (std::size_t i = 0; i < n; ++i) out.values[i] = static_cast<double>(n - 1 - i);
      break;
    case PositionalKind::Random: {
      out.name = "random";
      std::mt19937_64 gen(seed);
      for (auto& v : out.values) v = unit_uniform(gen);
      break;
    }
  }
  return out;
}

MetricSeries salience_series(const StoryTrace& trace, const SalienceConfig& cfg) {
  validate(cfg);
  if (cfg.combine_like_clus && cfg.measure != SalienceMeasure::Like) {
    throw ValidationError("the Like+Clus combination applies to the 'like' measure only");
  }
  const std::size_t n = trace.size();
  const auto embeddings = [&] {
    std::vector<Vector> out;
    for (const auto& rec : trace.sentences) out.push_back(rec.embedding);
    return out;
  };

  MetricSeries series;
  series.name = std::string(to_string(cfg.measure));
  series.values.assign(n, 0.0);

  const auto per_record = [&](const std::function<double(const SentenceRecord&)>& fn) {
    std::size_t computed = 0;
    for (std::size_t t = 0; t < n; ++t) {
      try {
        series.values[t] = fn(trace.sentences[t]);
        ++computed;
      } catch (const MissingInputError&) {
        series.values[t] = 0.0;
      }
    }
    if (computed == 0) {
      throw MissingInputError("salience '" + series.name + "': no sentence of story '" + trace.story_id +
                              "' carries the required window variants");
    }
  };

  switch (cfg.measure) {
    case SalienceMeasure::Like: per_record(like_salience); break;
    case SalienceMeasure::Swap: per_record(swap_salience); break;
    case SalienceMeasure::KnowDiff: per_record(knowledge_salience); break;
    case SalienceMeasure::EmbSal: per_record(emb_salience); break;
    case SalienceMeasure::EmbSurp:
      for (std::size_t t = 1; t < n; ++t) {
        series.values[t] = emb_surprise(trace.sentences[t].embedding, trace.sentences[t - 1].embedding);
      }
      break;
    case SalienceMeasure::Clus: series.values = clus_salience(embeddings(), cfg).values; break;
    case SalienceMeasure::Random: series.values = positional_baseline(n, PositionalKind::Random, cfg.rng_seed).values; break;
    case SalienceMeasure::Ascending: series.values = positional_baseline(n, PositionalKind::Ascending).values; break;
    case SalienceMeasure::Descending: series.values = positional_baseline(n, PositionalKind::Descending).values; break;
  }

  if (cfg.imp_adjust) {
    for (std::size_t t = 0; t < n; ++t) {
      const auto s = trace.sentences[t].sentiment.value_or(0.0);
      series.values[t] = imp_adjust(series.values[t], s);
    }
  }
  if (cfg.combine_like_clus) {
    const auto clus = clus_salience(embeddings(), cfg);
    auto combined = combine_like_clus(series, clus);
    combined.name = "like_clus";
    series = std::move(combined);
  }
  if (cfg.imp_adjust) series.name += "_imp";
  return series;
}

}  // namespace narr
