#include "narr/model.hpp"

#include <cmath>
#include <string>

#include "narr/error.hpp"

namespace narr {

namespace {

std::string at_sentence(std::size_t i, const std::string& field) {
  return "sentence " + std::to_string(i) + ": field '" + field + "'";
}

void require_finite(const Vector& v, std::size_t i, const std::string& field) {
  for (double x : v) {
    if (!std::isfinite(x)) throw ValidationError(at_sentence(i, field) + " contains a non-finite value");
  }
}

}  // namespace

std::vector<Vector> ContinuationSet::embeddings() const {
  std::vector<Vector> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.embedding);
  return out;
}

bool is_probability_vector(const Vector& p, double tol) noexcept {
  if (p.empty()) return false;
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

void validate(const ContinuationSet& cont, std::size_t embedding_dim) {
  if (cont.horizon < 1) throw ValidationError("field 'cont.n' must be >= 1");
  if (cont.samples.empty()) throw ValidationError("field 'cont.samples' must not be empty");
  for (const auto& s : cont.samples) {
    if (s.embedding.size() != embedding_dim) {
      throw ValidationError("field 'cont.samples.e' has length " + std::to_string(s.embedding.size()) +
                            ", expected " + std::to_string(embedding_dim));
    }
    if (s.sentiment && (*s.sentiment < -1.0 || *s.sentiment > 1.0)) {
      throw ValidationError("field 'cont.samples.sentiment' outside [-1, 1]");
    }
  }
  if (cont.probabilities) {
    if (cont.probabilities->size() != cont.samples.size()) {
      throw ValidationError("field 'cont.probs' length differs from sample count");
    }
    if (!is_probability_vector(*cont.probabilities)) {
      throw ValidationError("field 'cont.probs' is not a probability vector");
    }
  }
}

void validate(const SentenceRecord& rec, std::size_t embedding_dim) {
  const auto i = rec.index;
  if (rec.embedding.size() != embedding_dim) {
    throw ValidationError(at_sentence(i, "e") + " has length " + std::to_string(rec.embedding.size()) +
                          ", expected " + std::to_string(embedding_dim));
  }
  require_finite(rec.embedding, i, "e");
  if (rec.avg_log_likelihood && !std::isfinite(*rec.avg_log_likelihood)) {
    throw ValidationError(at_sentence(i, "avg_ll") + " is not finite");
  }
  if (rec.sentiment && (!(*rec.sentiment >= -1.0) || *rec.sentiment > 1.0)) {
    throw ValidationError(at_sentence(i, "sentiment") + " outside [-1, 1]");
  }
  for (const auto& [variant, lls] : rec.window_token_loglikes) {
    if (lls.empty()) throw ValidationError(at_sentence(i, "win_ll." + variant) + " is empty");
    require_finite(lls, i, "win_ll." + variant);
  }
  for (const auto& [variant, emb] : rec.window_embedding) {
    if (emb.empty()) throw ValidationError(at_sentence(i, "win_emb." + variant) + " is empty");
    require_finite(emb, i, "win_emb." + variant);
  }
  if (rec.continuations) {
    try {
      validate(*rec.continuations, embedding_dim);
    } catch (const ValidationError& e) {
      throw ValidationError("sentence " + std::to_string(i) + ": " + e.what());
    }
  }
}

void validate(const StoryTrace& trace) {
  if (trace.embedding_dim == 0) throw ValidationError("field 'embedding_dim' must be positive");
  if (trace.sentences.empty()) throw ValidationError("story has no sentences");
  for (std::size_t i = 0; i < trace.sentences.size(); ++i) {
    const auto& rec = trace.sentences[i];
    if (rec.index != i) {
      throw ValidationError(at_sentence(i, "index") + " is " + std::to_string(rec.index) +
                            "; indices must be contiguous from 0");
    }
    validate(rec, trace.embedding_dim);
  }
}

// ---------------------------------------------------------------------------

int ordinal(Judgment j) noexcept {
  switch (j) {
    case Judgment::BigDecrease: return -2;
    case Judgment::Decrease: return -1;
    case Judgment::Same: return 0;
    case Judgment::Increase: return 1;
    case Judgment::BigIncrease: return 2;
  }
  return 0;
}

std::string_view to_token(Judgment j) noexcept {
  switch (j) {
    case Judgment::BigDecrease: return "BD";
    case Judgment::Decrease: return "D";
    case Judgment::Same: return "S";
    case Judgment::Increase: return "I";
    case Judgment::BigIncrease: return "BI";
  }
  return "S";
}

Judgment judgment_from_token(std::string_view token) {
  if (token == "BD") return Judgment::BigDecrease;
  if (token == "D") return Judgment::Decrease;
  if (token == "S" || token == "NA") return Judgment::Same;
  if (token == "I") return Judgment::Increase;
  if (token == "BI") return Judgment::BigIncrease;
  throw ValidationError("unknown judgment token '" + std::string(token) + "'");
}

void validate(const AnnotationSet& annotations, std::size_t n_sentences) {
  std::size_t expected = n_sentences;
  for (const auto& [id, seq] : annotations.annotators) {
    if (seq.empty()) throw ValidationError("annotator '" + id + "' has no judgments");
    if (expected == 0) expected = seq.size();
    if (seq.size() != expected) {
      throw ValidationError("annotator '" + id + "' has " + std::to_string(seq.size()) +
                            " judgments, expected " + std::to_string(expected));
    }
  }
}

void validate(const GoldLabels& gold) {
  if (gold.story_length == 0) throw ValidationError("gold field 'n' must be positive");
  const auto in_bounds = [&](std::size_t i) { return i < gold.story_length; };
  if (gold.kind == GoldKind::Salience) {
    for (auto i : gold.salient_indices) {
      if (!in_bounds(i)) throw ValidationError("gold salient index " + std::to_string(i) + " out of bounds");
    }
    return;
  }
  if (gold.tp_positions.size() != kTurningPointCount) {
    throw ValidationError("gold turning points must list exactly 5 positions");
  }
  for (auto p : gold.tp_positions) {
    if (!in_bounds(p)) throw ValidationError("gold turning point " + std::to_string(p) + " out of bounds");
  }
  if (gold.tp_windows) {
    if (gold.tp_windows->size() != kTurningPointCount) {
      throw ValidationError("gold turning point windows must number exactly 5");
    }
    for (std::size_t i = 0; i < kTurningPointCount; ++i) {
      const auto& w = (*gold.tp_windows)[i];
      if (w.lo > w.hi || !in_bounds(w.hi)) throw ValidationError("gold window " + std::to_string(i) + " invalid");
      const auto p = gold.tp_positions[i];
      if (p < w.lo || p > w.hi) {
        throw ValidationError("gold window " + std::to_string(i) + " does not contain its position");
      }
    }
  }
}

}  // namespace narr
