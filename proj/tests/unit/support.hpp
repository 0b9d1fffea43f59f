#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "narr/model.hpp"

namespace testing_support {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return uniform() < p; }
  std::mt19937_64& engine() { return rng_; }

  narr::Vector vec(std::size_t dim, double lo = -1.0, double hi = 1.0) {
    narr::Vector v(dim);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

  /// Simplex point with strictly positive entries.
  narr::Vector simplex(std::size_t n) {
    narr::Vector p(n);
    double s = 0;
    for (auto& x : p) s += (x = uniform(0.05, 1.0));
    for (auto& x : p) x /= s;
    return p;
  }

  /// A valid trace with every optional field randomly present or absent.
  narr::StoryTrace trace(std::size_t n, std::size_t dim) {
    narr::StoryTrace t;
    t.story_id = "rand" + std::to_string(integer(0, 9999));
    t.embedding_dim = dim;
    if (coin()) t.meta["source"] = "generator";
    for (std::size_t i = 0; i < n; ++i) {
      narr::SentenceRecord r;
      r.index = i;
      if (coin()) r.text = "sentence, with \"quotes\" " + std::to_string(i);
      r.embedding = vec(dim);
      if (coin()) r.avg_log_likelihood = uniform(-6.0, -0.5);
      if (coin()) {
        for (const char* v : {narr::kVariantBase, narr::kVariantDeleted}) {
          r.window_token_loglikes[v] = vec(static_cast<std::size_t>(integer(1, 5)), -8.0, -0.1);
          r.window_embedding[v] = vec(dim);
        }
      }
      if (coin()) r.sentiment = uniform(-1.0, 1.0);
      if (coin()) {
        narr::ContinuationSet c;
        c.horizon = integer(1, 2);
        const auto m = static_cast<std::size_t>(integer(1, 4));
        for (std::size_t k = 0; k < m; ++k) {
          narr::ContinuationSample s;
          s.embedding = vec(dim);
          if (coin()) s.raw_score = uniform(-3.0, 3.0);
          if (coin()) s.sentiment = uniform(-1.0, 1.0);
          c.samples.push_back(std::move(s));
        }
        if (coin()) c.probabilities = simplex(m);
        r.continuations = std::move(c);
      }
      t.sentences.push_back(std::move(r));
    }
    return t;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testing_support
