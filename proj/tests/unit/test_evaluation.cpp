#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "narr/error.hpp"
#include "narr/evaluation.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace narr;

namespace {

Vector tied_ints(testing_support::Gen& g, std::size_t n, int hi) {
  Vector v(n);
  for (auto& x : v) x = g.integer(0, hi);
  return v;
}

bool all_tied(const Vector& v) { return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; }); }

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  for (char c : s) out.emplace_back(1, c);
  return out;
}

}  // namespace

TEST(Kendall, Examples) {
  EXPECT_DOUBLE_EQ(kendall_tau(Vector{1, 2, 3, 4}, Vector{1, 2, 3, 4}), 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau(Vector{1, 2, 3, 4}, Vector{4, 3, 2, 1}), -1.0);
  EXPECT_NEAR(kendall_tau(Vector{1, 2, 3}, Vector{1, 3, 2}), 1.0 / 3.0, 1e-15);
  EXPECT_THROW(kendall_tau(Vector{1, 1, 1}, Vector{1, 2, 3}), DegenerateError);
  EXPECT_THROW(kendall_tau(Vector{1}, Vector{1}), ValidationError);
  EXPECT_THROW(kendall_tau(Vector{1, 2}, Vector{1, 2, 3}), ValidationError);
}

TEST(Spearman, Examples) {
  EXPECT_DOUBLE_EQ(spearman_rho(Vector{3, 1, 2}, Vector{30, 10, 20}), 1.0);
  EXPECT_NEAR(spearman_rho(Vector{1, 2, 3}, Vector{3, 1, 2}), -0.5, 1e-15);
  EXPECT_NEAR(spearman_rho(Vector{1, 2, 3, 4}, Vector{4, 3, 2, 1}), -1.0, 1e-15);
  EXPECT_THROW(spearman_rho(Vector{2, 2}, Vector{1, 2}), DegenerateError);
}

TEST(RankCorrelation, MatchesBruteForceWithTies) {
  testing_support::Gen g(100);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto n = static_cast<std::size_t>(g.integer(2, 12));
    const auto x = tied_ints(g, n, g.integer(1, 6));
    const auto y = g.coin() ? tied_ints(g, n, 4) : g.vec(n);
    if (all_tied(x) || all_tied(y)) continue;
    EXPECT_NEAR(kendall_tau(x, y), oracle::kendall_tau_b(x, y), 1e-12);
    EXPECT_NEAR(spearman_rho(x, y), oracle::spearman_rho(x, y), 1e-12);
  }
}

TEST(RankCorrelation, InvariantUnderMonotoneTransforms) {
  testing_support::Gen g(101);
  for (int rep = 0; rep < 300; ++rep) {
    const auto n = static_cast<std::size_t>(g.integer(2, 30));
    const auto x = tied_ints(g, n, 5);
    const auto y = g.vec(n);
    if (all_tied(x)) continue;
    Vector fx = x, fy = y;
    for (auto& v : fx) v = std::exp(v) * 3.0 - 7.0;
    for (auto& v : fy) v = v * v * v + 2.0 * v;
    EXPECT_NEAR(kendall_tau(x, y), kendall_tau(fx, fy), 1e-12);
    EXPECT_NEAR(spearman_rho(x, y), spearman_rho(fx, fy), 1e-12);
  }
}

TEST(AverageRanks, Ties) { EXPECT_EQ(average_ranks(Vector{10, 20, 10, 30}), (Vector{1.5, 3, 1.5, 4})); }

TEST(Fisher, Examples) {
  const auto z = fisher_ci(0.0, 20);
  EXPECT_NEAR(z.lo, -z.hi, 1e-15);
  const auto a = fisher_ci(0.5, 50);
  EXPECT_NEAR(a.lo, 0.258, 1e-3);
  EXPECT_NEAR(a.hi, 0.683, 1e-3);
  // Closed form with the 97.5% normal quantile.
  const double q = 1.959963984540054;
  EXPECT_NEAR(a.lo, std::tanh(std::atanh(0.5) - q / std::sqrt(47.0)), 1e-12);
  EXPECT_NEAR(a.hi, std::tanh(std::atanh(0.5) + q / std::sqrt(47.0)), 1e-12);
  const auto b = fisher_ci(0.5, 10);
  EXPECT_LT(b.lo, a.lo);
  EXPECT_GT(b.hi, a.hi);
  EXPECT_THROW(fisher_ci(0.5, 3), DegenerateError);
  EXPECT_THROW(fisher_ci(1.0, 30), DegenerateError);
}

TEST(Peaks, Examples) {
  EXPECT_TRUE(find_peaks(Vector{1, 2, 3, 4}).empty());
  EXPECT_TRUE(find_peaks(Vector{1, 2}).empty());
  const auto p = find_peaks(Vector{0, 2, 1, 3, 0});
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0], (Peak{1, 2.0, 1.0}));
  EXPECT_EQ(p[1], (Peak{3, 3.0, 3.0}));
  EXPECT_EQ(find_peaks(Vector{0, 5, 0}), (std::vector<Peak>{{1, 5.0, 5.0}}));
}

TEST(Peaks, PlateauReportedAtLeftEdge) {
  const auto p = find_peaks(Vector{0, 2, 2, 2, 1});
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].index, 1u);
  EXPECT_EQ(p[0].prominence, 1.0);
  EXPECT_TRUE(find_peaks(Vector{0, 2, 2}).empty());
}

TEST(Peaks, MatchOracleOnRandomRealSeries) {
  testing_support::Gen g(102);
  for (int rep = 0; rep < 2000; ++rep) {
    const auto x = g.coin() ? tied_ints(g, static_cast<std::size_t>(g.integer(0, 25)), 4)
                            : g.vec(static_cast<std::size_t>(g.integer(0, 25)));
    const auto got = find_peaks(x);
    const auto want = oracle::peaks(x);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].index, want[i].index);
      EXPECT_EQ(got[i].height, x[want[i].index]);
      EXPECT_NEAR(got[i].prominence, want[i].prominence, 1e-15);
      EXPECT_GE(got[i].prominence, 0.0);
      EXPECT_LE(got[i].prominence, got[i].height - *std::min_element(x.begin(), x.end()));
    }
  }
}

TEST(TurningPoints, Assignment) {
  const std::vector<Peak> peaks{{1, 1, 1}, {5, 1, 2}, {7, 1, 5}, {12, 1, 1}};
  const std::vector<IndexRange> one{{0, 2}, {11, 13}};
  EXPECT_EQ(assign_turning_points(peaks, one), (std::vector<TurningPoint>{{1, false}, {12, false}}));
  const std::vector<IndexRange> two{{5, 8}};
  EXPECT_EQ(assign_turning_points(peaks, two), (std::vector<TurningPoint>{{7, false}}));
  const std::vector<IndexRange> none{{2, 4}, {8, 8}};
  const std::vector<IndexRange> gap{{4, 8}};
  EXPECT_EQ(assign_turning_points(std::vector<Peak>{}, gap), (std::vector<TurningPoint>{{6, true}}));
  EXPECT_EQ(assign_turning_points(peaks, none), (std::vector<TurningPoint>{{3, true}, {8, true}}));
  const std::vector<Peak> tie{{3, 1, 2}, {4, 1, 2}};
  EXPECT_EQ(assign_turning_points(tie, gap).front().index, 4u);
  const std::vector<IndexRange> both{{2, 6}};
  EXPECT_EQ(assign_turning_points(tie, both).front().index, 3u);
}

TEST(TurningPoints, Distance) {
  const std::vector<std::size_t> gold{4, 10, 20, 30, 35};
  EXPECT_EQ(tp_distance(gold, gold, 40), 0.0);
  const std::vector<std::size_t> off{7, 13, 23, 33, 38};
  EXPECT_DOUBLE_EQ(tp_distance(off, gold, 40), 7.5);
  EXPECT_THROW(tp_distance(off, gold, 38), ValidationError);
  EXPECT_THROW(tp_distance(off, gold, 0), ValidationError);
}

TEST(TurningPoints, DistanceTranslationInvariant) {
  testing_support::Gen g(103);
  for (int rep = 0; rep < 300; ++rep) {
    const auto n = static_cast<std::size_t>(g.integer(10, 80));
    std::vector<std::size_t> p(5), q(5);
    for (auto& v : p) v = static_cast<std::size_t>(g.integer(0, static_cast<int>(n) - 6));
    for (auto& v : q) v = static_cast<std::size_t>(g.integer(0, static_cast<int>(n) - 6));
    const auto shift = static_cast<std::size_t>(g.integer(0, 5));
    auto ps = p, qs = q;
    for (auto& v : ps) v += shift;
    for (auto& v : qs) v += shift;
    EXPECT_NEAR(tp_distance(p, q, n), tp_distance(ps, qs, n), 1e-12);
  }
}

TEST(Ranking, AveragePrecisionAndRecall) {
  const Vector scores{0.1, 0.9, 0.5, 0.2};  // order 1, 2, 3, 0
  EXPECT_EQ(ranking_order(scores), (std::vector<std::size_t>{1, 2, 3, 0}));
  EXPECT_DOUBLE_EQ(average_precision(scores, {1, 3}), 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(average_precision(scores, {1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(average_precision(scores, {1, 3}, 2), 0.5);
  EXPECT_DOUBLE_EQ(recall_at_k(Vector{0.1, 0.9, 0.1, 0.8}, {1, 2}), 0.5);
  EXPECT_DOUBLE_EQ(recall_at_k(scores, {1, 2}, 3), 1.0);
  EXPECT_THROW(recall_at_k(scores, {1}, 0), ValidationError);
  EXPECT_THROW(recall_at_k(scores, {}), ValidationError);
  EXPECT_THROW(average_precision(scores, {}), ValidationError);
  EXPECT_DOUBLE_EQ(mean_average_precision(Vector{1.0, 0.5}), 0.75);
}

TEST(Ranking, TiesKeepEarlierIndex) {
  EXPECT_EQ(ranking_order(Vector{1, 1, 2, 1}), (std::vector<std::size_t>{2, 0, 1, 3}));
}

TEST(Ranking, MatchOracleAndMonotoneInvariance) {
  testing_support::Gen g(104);
  for (int rep = 0; rep < 500; ++rep) {
    const auto n = static_cast<std::size_t>(g.integer(1, 30));
    const auto s = g.coin() ? tied_ints(g, n, 3) : g.vec(n);
    std::set<std::size_t> gold;
    while (gold.empty()) {
      for (std::size_t i = 0; i < n; ++i) {
        if (g.coin(0.3)) gold.insert(i);
      }
    }
    const auto k = static_cast<std::size_t>(g.integer(1, static_cast<int>(n)));
    EXPECT_NEAR(average_precision(s, gold), oracle::average_precision(s, gold), 1e-12);
    EXPECT_NEAR(recall_at_k(s, gold, k), oracle::recall_at_k(s, gold, k), 1e-12);
    Vector t = s;
    for (auto& v : t) v = std::atan(v) * 5 + 1;
    EXPECT_EQ(average_precision(s, gold), average_precision(t, gold));
    EXPECT_EQ(recall_at_k(s, gold, k), recall_at_k(t, gold, k));
  }
}

TEST(Rouge, Examples) {
  const std::vector<std::string> abc{"a", "b", "c"};
  const std::vector<std::string> ac{"a", "c"};
  const std::vector<std::string> xy{"x", "y"};
  EXPECT_DOUBLE_EQ(rouge_l(abc, abc).f1, 1.0);
  const auto r = rouge_l(abc, ac);
  EXPECT_DOUBLE_EQ(r.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.recall, 1.0);
  EXPECT_DOUBLE_EQ(r.f1, 0.8);
  EXPECT_EQ(rouge_l(abc, xy).f1, 0.0);
  EXPECT_THROW(rouge_l(abc, std::vector<std::string>{}), ValidationError);
}

TEST(Rouge, LcsMatchesMemoizedRecursion) {
  testing_support::Gen g(105);
  const std::string alphabet = "abcd";
  for (int rep = 0; rep < 500; ++rep) {
    std::string a, b;
    for (int i = g.integer(0, 12); i > 0; --i) a += alphabet[static_cast<std::size_t>(g.integer(0, 3))];
    for (int i = g.integer(0, 12); i > 0; --i) b += alphabet[static_cast<std::size_t>(g.integer(0, 3))];
    const auto ta = tokens(a), tb = tokens(b);
    EXPECT_EQ(lcs_length(ta, tb), oracle::lcs(ta, tb)) << a << " / " << b;
    EXPECT_EQ(lcs_length(ta, tb), lcs_length(tb, ta));
    if (!ta.empty() && !tb.empty()) EXPECT_DOUBLE_EQ(rouge_l(ta, tb).f1, rouge_l(tb, ta).f1);
  }
}
