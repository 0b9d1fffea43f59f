#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "narr/baseline.hpp"
#include "narr/error.hpp"
#include "narr/salience.hpp"
#include "narr/synthetic.hpp"
#include "narr/tokenize.hpp"
#include "narr/trace_io.hpp"
#include "narr/vector_ops.hpp"

using namespace narr;

namespace {

std::vector<std::string> toks(const char* s) { return tokenize(s); }

const std::vector<std::string> kStory{"The knight rode to the castle at dawn.",
                                      "A storm broke over the hills and the river rose.",
                                      "The knight crossed the bridge before it fell.",
                                      "At the castle gate the guards had fled."};

NgramLM bigram_on(const std::vector<std::string>& sentences) {
  NgramLM lm(2);
  for (const auto& s : sentences) lm.train(tokenize(s));
  return lm;
}

}  // namespace

TEST(Embedder, DeterministicUnitNorm) {
  const HashEmbedder e{16, 3};
  const auto a = embed("the silver comet fell", e);
  EXPECT_EQ(a, embed("the silver comet fell", e));
  EXPECT_NEAR(l2_norm(a), 1.0, 1e-12);
  EXPECT_EQ(a.size(), 16u);
  EXPECT_THROW(embed("   ", e), ValidationError);
  EXPECT_THROW(embed("word", HashEmbedder{1, 0}), ValidationError);
}

TEST(Embedder, SeedsRarelyCollide) {
  int collisions = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::string text = "sentence number " + std::to_string(i);
    const auto a = embed(text, HashEmbedder{8, static_cast<std::uint64_t>(i)});
    const auto b = embed(text, HashEmbedder{8, static_cast<std::uint64_t>(i) + 1});
    if (cosine_similarity(a, b) > 1.0 - 1e-9) ++collisions;
  }
  EXPECT_LT(collisions, 10);
}

TEST(NgramLM, UnigramArithmetic) {
  NgramLM lm(1);
  lm.train(toks("a a b"));
  EXPECT_EQ(lm.vocabulary_size(), 2u);
  EXPECT_DOUBLE_EQ(lm_loglik(toks("a"), lm)[0], std::log(0.6));
  lm.add_vocabulary(toks("c"));
  EXPECT_DOUBLE_EQ(lm_loglik(toks("c"), lm)[0], std::log(1.0 / (3.0 + 3.0)));
  EXPECT_THROW(lm_loglik({}, lm), ValidationError);
  EXPECT_THROW(NgramLM(3), ValidationError);
}

TEST(NgramLM, EmptyCorpusIsUniform) {
  for (int order : {1, 2}) {
    NgramLM lm(order);
    lm.add_vocabulary(toks("w x y z"));
    for (double ll : lm_loglik(toks("x z w"), lm)) EXPECT_DOUBLE_EQ(ll, std::log(0.25));
  }
  NgramLM none(2);
  EXPECT_THROW(lm_loglik(toks("x"), none), ValidationError);
}

TEST(NgramLM, DistributionsSumToOneForEveryContext) {
  auto lm = bigram_on({kStory[0], kStory[1]});
  BigramCounts ctx;
  const auto extra = tokenize(kStory[2]);
  lm.add_vocabulary(extra);
  ctx.add_sequence(extra, kSentenceStart);
  std::vector<std::string> histories{kSentenceStart};
  for (const auto& [w, c] : lm.vocabulary()) histories.push_back(w);
  for (const BigramCounts* context : std::vector<const BigramCounts*>{nullptr, &ctx}) {
    for (const auto& u : histories) {
      double s = 0;
      for (const auto& [w, c] : lm.vocabulary()) s += lm.probability(w, u, context);
      EXPECT_NEAR(s, 1.0, 1e-12) << u;
    }
  }
  NgramLM uni(1);
  uni.train(extra);
  double s = 0;
  for (const auto& [w, c] : uni.vocabulary()) s += uni.probability(w, "x");
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(NgramLM, ReadingContextRaisesSeenBigrams) {
  auto lm = bigram_on({"a b c"});
  lm.add_vocabulary(toks("d"));
  BigramCounts ctx;
  ctx.add("c", "d");
  EXPECT_GT(lm.probability("d", "c", &ctx), lm.probability("d", "c"));
}

TEST(Sentiment, Lexicon) {
  EXPECT_EQ(lexicon_sentiment(toks("the door")), 0.0);
  EXPECT_GT(lexicon_sentiment(toks("joy and love")), 0.0);
  EXPECT_LT(lexicon_sentiment(toks("fear and death")), 0.0);
  EXPECT_LT(std::abs(lexicon_sentiment(toks("joy joy joy joy joy joy joy joy joy joy"))), 1.0);
}

TEST(BuildTrace, TwoSentenceStory) {
  const auto lm = bigram_on({"the sky is grey"});
  const auto t = build_trace("pair", {"It rained.", "Then it stopped."}, HashEmbedder{8, 1}, lm);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_NO_THROW(validate(t));
  const auto& r0 = t.sentences[0];
  for (const char* v : {kVariantBase, kVariantDeleted, kVariantNoKnowledge}) {
    EXPECT_TRUE(r0.window_token_loglikes.count(v)) << v;
    EXPECT_TRUE(r0.window_embedding.count(v)) << v;
  }
  EXPECT_TRUE(t.sentences[1].window_token_loglikes.empty());
  EXPECT_THROW(build_trace("one", {"Alone."}, HashEmbedder{8, 1}, lm), ValidationError);
  EXPECT_THROW(build_trace("x", {"Fine.", "..."}, HashEmbedder{8, 1}, lm), ValidationError);
}

TEST(BuildTrace, WindowsAndVariants) {
  const auto lm = bigram_on({"the sky is grey", "the knight is brave"});
  BuildOptions opts;
  opts.window_tokens = 5;
  opts.continuation_pool = {"A hawk circled.", "Rain fell on the road."};
  opts.continuations_per_sentence = 3;
  const auto t = build_trace("k", kStory, HashEmbedder{8, 1}, lm, opts);
  EXPECT_EQ(t.sentences[0].window_token_loglikes.at(kVariantBase).size(), 5u);
  EXPECT_TRUE(t.sentences[1].window_token_loglikes.count(kVariantSwapped));
  EXPECT_FALSE(t.sentences[0].window_token_loglikes.count(kVariantSwapped));
  // The last window holds the remaining tokens of the story only.
  const auto last = tokenize(kStory[3]).size();
  EXPECT_EQ(t.sentences[2].window_token_loglikes.at(kVariantBase).size(), std::min<std::size_t>(5, last));
  for (const auto& r : t.sentences) {
    ASSERT_TRUE(r.continuations.has_value());
    EXPECT_EQ(r.continuations->samples.size(), 3u);
    EXPECT_NEAR(l2_norm(r.embedding), 1.0, 1e-12);
    ASSERT_TRUE(r.sentiment.has_value());
  }
}

TEST(BuildTrace, UnigramLikeSalienceIsZero) {
  NgramLM lm(1);
  lm.train(toks("a quiet village by the sea"));
  const auto t = build_trace("u", kStory, HashEmbedder{8, 1}, lm);
  for (const auto& r : t.sentences) {
    if (r.window_token_loglikes.empty()) continue;
    EXPECT_EQ(like_salience(r), 0.0);
  }
}

TEST(BuildTrace, ByteIdenticalRebuilds) {
  const auto lm = bigram_on({"the sky is grey"});
  BuildOptions opts;
  opts.continuation_pool = {"A hawk circled.", "Rain fell on the road.", "Night came."};
  opts.seed = 99;
  auto bytes = [&] {
    std::ostringstream out;
    write_trace(build_trace("k", kStory, HashEmbedder{16, 2}, lm, opts), out);
    return out.str();
  };
  EXPECT_EQ(bytes(), bytes());
}

TEST(Synthetic, DeterministicAndWellFormed) {
  const auto a = make_synthetic_corpus(7);
  const auto b = make_synthetic_corpus(7);
  ASSERT_EQ(a.stories.size(), 7u);
  for (std::size_t i = 0; i < a.stories.size(); ++i) {
    const auto& s = a.stories[i];
    EXPECT_EQ(s.sentences, b.stories[i].sentences);
    EXPECT_EQ(s.annotations, b.stories[i].annotations);
    EXPECT_NO_THROW(validate(s.turning_points));
    EXPECT_EQ(s.turning_points.story_length, s.sentences.size());
    EXPECT_EQ(s.summary.size(), s.summary_sources.size());
    for (const auto& [name, js] : s.annotations.annotators) EXPECT_EQ(js.size(), s.sentences.size()) << name;
  }
  EXPECT_EQ(a.stories.back().id, "pivot");
  EXPECT_NE(make_synthetic_corpus(8).stories[0].sentences, a.stories[0].sentences);
}

TEST(Synthetic, PivotSentenceHasStrictlyHighestLikeSalience) {
  const auto corpus = make_synthetic_corpus(7);
  NgramLM lm(2);
  for (std::size_t j = 0; j + 1 < corpus.stories.size(); ++j) {
    for (const auto& s : corpus.stories[j].sentences) lm.train(tokenize(s));
  }
  const auto& pivot = corpus.stories.back();
  const auto t = build_trace(pivot.id, pivot.sentences, HashEmbedder{32, 7}, lm);
  const auto like = salience_series(t, SalienceConfig{});
  const std::size_t p = *pivot.pivot;
  for (std::size_t i = 0; i < like.size(); ++i) {
    if (i != p) EXPECT_LT(like.values[i], like.values[p]) << i;
  }
}
