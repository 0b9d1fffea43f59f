#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "narr/annotation.hpp"
#include "narr/error.hpp"
#include "narr/evaluation.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace narr;
using J = Judgment;

namespace {

std::vector<J> negate(std::vector<J> js) {
  for (auto& j : js) j = static_cast<J>(4 - static_cast<int>(j));
  return js;
}

std::vector<J> random_judgments(testing_support::Gen& g, std::size_t n) {
  std::vector<J> js(n);
  js[0] = J::Same;
  for (std::size_t i = 1; i < n; ++i) js[i] = static_cast<J>(g.integer(0, 4));
  return js;
}

oracle::Level to_oracle(MeasurementLevel l) {
  switch (l) {
    case MeasurementLevel::Nominal: return oracle::Level::Nominal;
    case MeasurementLevel::Ordinal: return oracle::Level::Ordinal;
    case MeasurementLevel::Interval: return oracle::Level::Interval;
  }
  return oracle::Level::Nominal;
}

}  // namespace

TEST(AbsoluteCurve, Examples) {
  EXPECT_EQ(absolute_curve(std::vector<J>{J::Same, J::Same}).values, (Vector{0, 0}));
  const auto c = absolute_curve(std::vector<J>{J::Increase, J::Same, J::BigDecrease}).values;
  EXPECT_NEAR(c[0], 0.1, 1e-15);
  EXPECT_NEAR(c[1], 0.1, 1e-15);
  EXPECT_NEAR(c[2], -0.1, 1e-15);
  const auto b = absolute_curve(std::vector<J>(3, J::BigIncrease)).values;
  EXPECT_NEAR(b[0], 0.2, 1e-15);
  EXPECT_NEAR(b[1], 0.4, 1e-15);
  EXPECT_NEAR(b[2], 0.6, 1e-15);
  EXPECT_THROW(absolute_curve(std::vector<J>{}), ValidationError);
}

TEST(AbsoluteCurve, LinearInMapping) {
  testing_support::Gen g(4);
  for (int rep = 0; rep < 200; ++rep) {
    const auto js = random_judgments(g, static_cast<std::size_t>(g.integer(1, 30)));
    const double c = g.uniform(0.5, 4.0);
    JudgmentMapping scaled{-0.2 * c, -0.1 * c, 0.0, 0.1 * c, 0.2 * c};
    const auto a = absolute_curve(js).values;
    const auto b = absolute_curve(js, scaled).values;
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], c * a[i], 1e-12);
  }
}

TEST(JudgmentMapping, Validation) {
  EXPECT_NO_THROW(validate(JudgmentMapping{}));
  EXPECT_THROW(validate(JudgmentMapping{-0.2, -0.1, 0.01, 0.1, 0.2}), ValidationError);
  EXPECT_THROW(validate(JudgmentMapping{-0.13, -0.1, 0.0, 0.1, 0.2}), ValidationError);
  EXPECT_THROW(validate(JudgmentMapping{-0.2, -0.1, 0.0, 0.1, 0.05}), ValidationError);
}

TEST(MappingChoice, RankCorrelationUnchangedWhenCurveOrderPreserved) {
  testing_support::Gen g(5);
  const JudgmentMapping other{-0.5, -0.2, 0.0, 0.2, 0.5};
  int checked = 0;
  for (int rep = 0; rep < 2000 && checked < 200; ++rep) {
    const auto js = random_judgments(g, static_cast<std::size_t>(g.integer(3, 12)));
    const auto a = absolute_curve(js).values;
    const auto b = absolute_curve(js, other).values;
    // Keep only sequences where both mappings induce the same strict ordering.
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = i + 1; j < a.size(); ++j) {
        const double da = a[i] - a[j], db = b[i] - b[j];
        if (std::abs(da) < 1e-9 || std::abs(db) < 1e-9 || (da > 0) != (db > 0)) same = false;
      }
    }
    if (!same) continue;
    ++checked;
    const auto pred = g.vec(a.size());
    EXPECT_NEAR(kendall_tau(pred, a), kendall_tau(pred, b), 1e-12);
    EXPECT_NEAR(spearman_rho(pred, a), spearman_rho(pred, b), 1e-12);
  }
  EXPECT_GT(checked, 20);
}

TEST(ZScore, Examples) {
  const auto z = zscore(Vector{1, 2, 3});
  EXPECT_NEAR(z[0], -std::sqrt(1.5), 1e-12);
  EXPECT_NEAR(z[1], 0.0, 1e-12);
  EXPECT_NEAR(z[2], std::sqrt(1.5), 1e-12);
  EXPECT_NEAR(z[2], 1.2247, 1e-4);
  EXPECT_THROW(zscore(Vector{5, 5, 5}), DegenerateError);
  EXPECT_THROW(zscore(Vector{5}), DegenerateError);
  const auto s = zscore(MetricSeries{"x", {3, 1, 4, 1, 5}, false});
  EXPECT_TRUE(s.normalized);
}

TEST(ZScore, MeanZeroUnitVarianceIdempotent) {
  testing_support::Gen g(6);
  for (int rep = 0; rep < 300; ++rep) {
    const auto v = g.vec(static_cast<std::size_t>(g.integer(2, 40)), -100, 100);
    const auto z = zscore(v);
    double m = 0, s = 0;
    for (double x : z) m += x;
    m /= double(z.size());
    for (double x : z) s += (x - m) * (x - m);
    EXPECT_NEAR(m, 0.0, 1e-12);
    EXPECT_NEAR(s / double(z.size()), 1.0, 1e-12);
    const auto zz = zscore(z);
    for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(zz[i], z[i], 1e-12);
  }
}

TEST(Krippendorff, Examples) {
  const ReliabilityTable binary{{0.0, 0.0}, {1.0, 1.0}, {1.0, 0.0}, {0.0, 0.0}};
  EXPECT_NEAR(krippendorff_alpha(binary, MeasurementLevel::Nominal), 16.0 / 30.0, 1e-12);

  const ReliabilityTable same{{0.0, 0.0}, {2.0, 2.0}, {1.0, 1.0}};
  for (auto l : {MeasurementLevel::Nominal, MeasurementLevel::Ordinal, MeasurementLevel::Interval}) {
    EXPECT_NEAR(krippendorff_alpha(same, l), 1.0, 1e-12);
  }
  const ReliabilityTable constant{{1.0, 1.0}, {1.0, 1.0}};
  EXPECT_THROW(krippendorff_alpha(constant, MeasurementLevel::Nominal), DegenerateError);
  const ReliabilityTable lonely{{1.0, std::nullopt}, {std::nullopt, 2.0}};
  EXPECT_THROW(krippendorff_alpha(lonely, MeasurementLevel::Interval), DegenerateError);
}

TEST(Krippendorff, MatchesPairwiseOracleWithMissingValues) {
  testing_support::Gen g(7);
  int compared = 0;
  for (int rep = 0; rep < 400; ++rep) {
    const auto units = static_cast<std::size_t>(g.integer(2, 12));
    const auto coders = static_cast<std::size_t>(g.integer(2, 5));
    ReliabilityTable t(units, std::vector<std::optional<double>>(coders));
    for (auto& u : t) {
      for (auto& v : u) {
        if (!g.coin(0.2)) v = static_cast<double>(g.integer(-2, 2));
      }
    }
    for (auto l : {MeasurementLevel::Nominal, MeasurementLevel::Ordinal, MeasurementLevel::Interval}) {
      double got = 0;
      try {
        got = krippendorff_alpha(t, l);
      } catch (const DegenerateError&) {
        continue;
      }
      EXPECT_NEAR(got, oracle::krippendorff_alpha(t, to_oracle(l)), 1e-12);
      ++compared;
    }
  }
  EXPECT_GT(compared, 1000);
}

TEST(Krippendorff, SymmetricUnderRelabelingAndUnitPermutation) {
  testing_support::Gen g(8);
  for (int rep = 0; rep < 200; ++rep) {
    ReliabilityTable t(static_cast<std::size_t>(g.integer(3, 10)),
                       std::vector<std::optional<double>>(static_cast<std::size_t>(g.integer(2, 4))));
    for (auto& u : t) {
      for (auto& v : u) v = static_cast<double>(g.integer(0, 3));
    }
    t[0][0] = 0.0;
    t[0][1] = 3.0;
    auto p = t;
    std::shuffle(p.begin(), p.end(), g.engine());
    for (auto& u : p) std::reverse(u.begin(), u.end());
    for (auto l : {MeasurementLevel::Nominal, MeasurementLevel::Ordinal, MeasurementLevel::Interval}) {
      EXPECT_NEAR(krippendorff_alpha(t, l), krippendorff_alpha(p, l), 1e-12);
    }
  }
}

TEST(Krippendorff, AnnotationSetUsesJudgmentCodes) {
  AnnotationSet a{"s", {{"x", {J::Same, J::Increase, J::Decrease, J::Same}}, {"y", {J::Same, J::Increase, J::Same, J::Same}}}};
  const ReliabilityTable t{{0.0, 0.0}, {1.0, 1.0}, {-1.0, 0.0}, {0.0, 0.0}};
  EXPECT_NEAR(krippendorff_alpha(a, MeasurementLevel::Nominal), krippendorff_alpha(t, MeasurementLevel::Nominal),
              1e-15);
  EXPECT_NEAR(krippendorff_alpha(a, MeasurementLevel::Ordinal), krippendorff_alpha(t, MeasurementLevel::Ordinal),
              1e-15);
}

TEST(PairwiseCorrelation, Examples) {
  const std::vector<J> js{J::Same, J::Increase, J::BigIncrease, J::Decrease, J::Same, J::BigDecrease, J::Increase};
  const auto curve = absolute_curve(js);
  MetricSeries pred{"p", curve.values, false};

  const AnnotationSet one{"s", {{"a", js}}};
  auto r = pairwise_correlation(pred, one);
  EXPECT_NEAR(r.tau, 1.0, 1e-12);
  EXPECT_NEAR(r.rho, 1.0, 1e-12);

  MetricSeries neg{"n", curve.values, false};
  for (auto& v : neg.values) v = -v;
  r = pairwise_correlation(neg, one);
  EXPECT_NEAR(r.tau, -1.0, 1e-12);
  EXPECT_NEAR(r.rho, -1.0, 1e-12);

  const AnnotationSet two{"s", {{"a", js}, {"b", negate(js)}}};
  r = pairwise_correlation(pred, two);
  EXPECT_NEAR(r.tau, 0.0, 1e-12);
  EXPECT_NEAR(r.rho, 0.0, 1e-12);
  EXPECT_EQ(r.pairs_used, 2u);
}

TEST(PairwiseCorrelation, DegeneratePairsSkipped) {
  const std::vector<J> js{J::Same, J::Increase, J::Decrease};
  const AnnotationSet mixed{"s", {{"a", js}, {"flat", {J::Same, J::Same, J::Same}}}};
  const auto r = pairwise_correlation(MetricSeries{"p", {0.0, 0.1, 0.0}, false}, mixed);
  EXPECT_EQ(r.pairs_used, 1u);
  EXPECT_EQ(r.pairs_skipped, 1u);
  const AnnotationSet flat{"s", {{"flat", {J::Same, J::Same, J::Same}}}};
  EXPECT_THROW(pairwise_correlation(MetricSeries{"p", {1, 2, 3}, false}, flat), DegenerateError);
  EXPECT_THROW(pairwise_correlation(MetricSeries{"p", {1, 2}, false}, mixed), ValidationError);
}

TEST(HumanUpperBound, Examples) {
  const std::vector<J> js{J::Same, J::BigIncrease, J::Decrease, J::Increase, J::Increase};
  const AnnotationSet same{"s", {{"a", js}, {"b", js}, {"c", js}}};
  auto r = human_upper_bound(same);
  EXPECT_NEAR(r.tau, 1.0, 1e-12);
  EXPECT_NEAR(r.rho, 1.0, 1e-12);

  const AnnotationSet rev{"s", {{"a", js}, {"b", negate(js)}}};
  r = human_upper_bound(rev);
  EXPECT_NEAR(r.tau, -1.0, 1e-12);
  EXPECT_NEAR(r.rho, -1.0, 1e-12);

  const AnnotationSet three{"s", {{"a", js}, {"b", js}, {"c", negate(js)}}};
  r = human_upper_bound(three);
  EXPECT_NEAR(r.tau, -1.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.rho, -1.0 / 3.0, 1e-12);

  EXPECT_THROW(human_upper_bound(AnnotationSet{"s", {{"a", js}}}), ValidationError);
}
