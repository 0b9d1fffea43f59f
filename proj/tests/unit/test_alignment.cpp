#include <cmath>

#include <gtest/gtest.h>

#include "narr/alignment.hpp"
#include "narr/error.hpp"
#include "support.hpp"

using namespace narr;

namespace {

Vector at_cosine(double s) { return {s, std::sqrt(1.0 - s * s)}; }

AlignConfig wide() {
  AlignConfig c;
  c.window_fraction = 1.0;
  return c;
}

std::vector<Vector> random_vectors(testing_support::Gen& g, std::size_t n, std::size_t dim) {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto v = g.vec(dim, 0.0, 1.0);  // non-negative so similarities spread over [0, 1]
    v[static_cast<std::size_t>(g.integer(0, static_cast<int>(dim) - 1))] += 0.5;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

TEST(Align, PerfectMatchInsideWindow) {
  const std::vector<Vector> summary{{0, 1, 0}};
  const std::vector<Vector> full{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const auto r = align(summary, full, wide());
  EXPECT_EQ(r.labels.salient_indices, (std::set<std::size_t>{1}));
  ASSERT_EQ(r.matches.size(), 1u);
  EXPECT_EQ(r.matches[0], (AlignmentMatch{0, 1, 1.0}));
  EXPECT_EQ(r.labels.kind, GoldKind::Salience);
  EXPECT_EQ(r.labels.story_length, 3u);
}

TEST(Align, BelowThresholdYieldsNothing) {
  const std::vector<Vector> summary{{1, 0}};
  const std::vector<Vector> full{at_cosine(0.30), at_cosine(0.10)};
  EXPECT_TRUE(align(summary, full, wide()).labels.salient_indices.empty());
}

TEST(Align, SlackKeepsRunnerUpOnly) {
  const std::vector<Vector> summary{{1, 0}};
  const std::vector<Vector> full{at_cosine(0.40), at_cosine(0.50), at_cosine(0.46)};
  const auto r = align(summary, full, wide());
  EXPECT_EQ(r.labels.salient_indices, (std::set<std::size_t>{1, 2}));
  ASSERT_EQ(r.matches.size(), 2u);
  EXPECT_EQ(r.matches[0].fulltext_index, 1u);
  EXPECT_EQ(r.matches[1].fulltext_index, 2u);
}

TEST(Align, CapAppliedAfterFilterWithEarlierIndexOnTies) {
  const std::vector<Vector> summary{{1, 0}};
  const std::vector<Vector> full(5, at_cosine(0.6));
  AlignConfig c = wide();
  c.max_matches = 2;
  EXPECT_EQ(align(summary, full, c).labels.salient_indices, (std::set<std::size_t>{0, 1}));
}

TEST(Align, RelativePositionWindow) {
  // Two summary sentences over ten full-text sentences: the first looks at
  // positions 0 and 0.1, the second at 0.4 to 0.6.
  std::vector<Vector> full(10, Vector{1, 0});
  const std::vector<Vector> summary{{1, 0}, {1, 0}};
  AlignConfig c;
  c.max_matches = 10;
  const auto r = align(summary, full, c);
  EXPECT_EQ(r.labels.salient_indices, (std::set<std::size_t>{0, 1, 4, 5, 6}));
  EXPECT_EQ(r.empty_windows, 0u);
}

TEST(Align, EmptyWindowCounted) {
  const std::vector<Vector> summary{{1, 0}, {1, 0}};
  const std::vector<Vector> full{{1, 0}};
  const auto r = align(summary, full, AlignConfig{});
  EXPECT_EQ(r.empty_windows, 1u);
  EXPECT_EQ(r.labels.salient_indices, (std::set<std::size_t>{0}));
}

TEST(Align, Errors) {
  const std::vector<Vector> ok{{1, 0}};
  const std::vector<Vector> zero{{0, 0}};
  const std::vector<Vector> none;
  EXPECT_THROW(align(ok, zero), ValidationError);
  EXPECT_THROW(align(zero, ok), ValidationError);
  EXPECT_THROW(align(none, ok), ValidationError);
  EXPECT_THROW(align(ok, none), ValidationError);
  AlignConfig bad;
  bad.max_matches = 0;
  EXPECT_THROW(align(ok, ok, bad), ValidationError);
  bad = AlignConfig{};
  bad.window_fraction = 0.0;
  EXPECT_THROW(validate(bad), ValidationError);
}

TEST(Align, Properties) {
  testing_support::Gen g(30);
  for (int rep = 0; rep < 300; ++rep) {
    const auto dim = static_cast<std::size_t>(g.integer(2, 8));
    const auto summary = random_vectors(g, static_cast<std::size_t>(g.integer(1, 8)), dim);
    const auto full = random_vectors(g, static_cast<std::size_t>(g.integer(1, 40)), dim);
    AlignConfig c;
    c.window_fraction = g.uniform(0.05, 0.4);
    c.min_similarity = g.uniform(0.3, 0.9);
    c.slack = g.uniform(0.0, 0.2);
    c.max_matches = static_cast<std::size_t>(g.integer(1, 4));
    const auto base = align(summary, full, c).labels.salient_indices;

    auto stricter = c;
    stricter.min_similarity += g.uniform(0.0, 0.1);
    for (auto i : align(summary, full, stricter).labels.salient_indices) EXPECT_TRUE(base.count(i));

    auto more = c;
    more.max_matches += 1;
    const auto wider = align(summary, full, more).labels.salient_indices;
    for (auto i : base) EXPECT_TRUE(wider.count(i));

    auto scaled_s = summary;
    auto scaled_f = full;
    const double a = g.uniform(0.1, 10), b = g.uniform(0.1, 10);
    for (auto& v : scaled_s) for (auto& x : v) x *= a;
    for (auto& v : scaled_f) for (auto& x : v) x *= b;
    EXPECT_EQ(align(scaled_s, scaled_f, c).labels.salient_indices, base);

    for (auto y : base) {
      bool inside = false;
      for (std::size_t x = 0; x < summary.size(); ++x) {
        const double d = std::abs(double(y) / double(full.size()) - double(x) / double(summary.size()));
        inside = inside || d <= c.window_fraction + 1e-12;
      }
      EXPECT_TRUE(inside) << y;
    }
  }
}

TEST(AlignmentReport, Coverage) {
  GoldLabels none{GoldKind::Salience, "s", 148, {}, {}, std::nullopt};
  EXPECT_EQ(alignment_report(none, 148).coverage, 0.0);
  GoldLabels some = none;
  for (std::size_t i = 0; i < 31; ++i) some.salient_indices.insert(i * 4);
  const auto r = alignment_report(some, 148);
  EXPECT_EQ(r.labelled, 31u);
  EXPECT_NEAR(r.coverage, 0.209, 5e-4);
  GoldLabels all{GoldKind::Salience, "s", 3, {0, 1, 2}, {}, std::nullopt};
  EXPECT_EQ(alignment_report(all, 3).coverage, 1.0);
}
