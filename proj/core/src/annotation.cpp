#include "narr/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "narr/error.hpp"
#include "narr/evaluation.hpp"

namespace narr {

double JudgmentMapping::value(Judgment j) const noexcept {
  switch (j) {
    case Judgment::BigDecrease: return big_decrease;
    case Judgment::Decrease: return decrease;
    case Judgment::Same: return same;
    case Judgment::Increase: return increase;
    case Judgment::BigIncrease: return big_increase;
  }
  return 0.0;
}

void validate(const JudgmentMapping& m) {
  if (m.same != 0.0) throw ValidationError("judgment mapping: Same must be 0");
  if (!(m.decrease < 0.0 && m.big_decrease < 0.0)) throw ValidationError("judgment mapping: decreases must be negative");
  if (!(m.increase > 0.0 && m.big_increase > 0.0)) throw ValidationError("judgment mapping: increases must be positive");
  // Small slack so the default constants (0.1 - 0.05 in binary) pass.
  constexpr double slack = 1e-12;
  const double ordered[] = {m.big_decrease, m.decrease, m.same, m.increase, m.big_increase};
  for (int i = 0; i + 1 < 5; ++i) {
    if (ordered[i + 1] - ordered[i] < kMinJudgmentSeparation - slack) {
      throw ValidationError("judgment mapping: neighbouring values must differ by at least 0.05");
    }
  }
}

MetricSeries absolute_curve(std::span<const Judgment> judgments, const JudgmentMapping& mapping) {
  if (judgments.empty()) throw ValidationError("absolute_curve: no judgments");
  validate(mapping);
  MetricSeries out;
  out.name = "annotation";
  out.values.reserve(judgments.size());
  double acc = 0.0;
  for (auto j : judgments) {
    acc += mapping.value(j);
    out.values.push_back(acc);
  }
  return out;
}

Vector zscore(std::span<const double> values) {
  if (values.size() < 2) throw DegenerateError("zscore needs at least two values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  const double sd = std::sqrt(var);
  // Relative test so curves of tiny magnitude are not mistaken for constants.
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  if (sd == 0.0 || sd <= scale * 1e-14) throw DegenerateError("zscore of a constant series");
  Vector out(values.begin(), values.end());
  for (double& v : out) v = (v - mean) / sd;
  return out;
}

MetricSeries zscore(const MetricSeries& series) {
  MetricSeries out{series.name, zscore(series.values), true};
  return out;
}

// ---------------------------------------------------------------------------

double krippendorff_alpha(const ReliabilityTable& table, MeasurementLevel level) {
  std::vector<double> values;
  for (const auto& unit : table) {
    std::size_t m = 0;
    for (const auto& v : unit) m += v.has_value();
    if (m < 2) continue;
    for (const auto& v : unit) {
      if (v) values.push_back(*v);
    }
  }
  if (values.empty()) throw DegenerateError("krippendorff_alpha: no pairable values");
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const std::size_t nv = values.size();
  const auto index_of = [&](double v) {
    return static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), v) - values.begin());
  };

  std::vector<std::vector<double>> coincidence(nv, std::vector<double>(nv, 0.0));
  for (const auto& unit : table) {
    std::vector<std::size_t> idx;
    for (const auto& v : unit) {
      if (v) idx.push_back(index_of(*v));
    }
    if (idx.size() < 2) continue;
    const double w = 1.0 / static_cast<double>(idx.size() - 1);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (std::size_t j = 0; j < idx.size(); ++j) {
        if (i != j) coincidence[idx[i]][idx[j]] += w;
      }
    }
  }

  std::vector<double> marginal(nv, 0.0);
  double n = 0.0;
  for (std::size_t c = 0; c < nv; ++c) {
    for (std::size_t k = 0; k < nv; ++k) marginal[c] += coincidence[c][k];
    n += marginal[c];
  }

  const auto delta2 = [&](std::size_t c, std::size_t k) -> double {
    if (c == k) return 0.0;
    switch (level) {
      case MeasurementLevel::Nominal: return 1.0;
      case MeasurementLevel::Interval: {
        const double d = values[c] - values[k];
        return d * d;
      }
      case MeasurementLevel::Ordinal: {
        const auto lo = std::min(c, k);
        const auto hi = std::max(c, k);
        double s = 0.0;
        for (std::size_t g = lo; g <= hi; ++g) s += marginal[g];
        s -= (marginal[c] + marginal[k]) / 2.0;
        return s * s;
      }
    }
    return 0.0;
  };

  double observed = 0.0;
  double expected = 0.0;
  for (std::size_t c = 0; c < nv; ++c) {
    for (std::size_t k = 0; k < nv; ++k) {
      const double d = delta2(c, k);
      observed += coincidence[c][k] * d;
      expected += marginal[c] * marginal[k] * d;
    }
  }
  observed /= n;
  expected /= n * (n - 1.0);
  if (expected == 0.0) throw DegenerateError("krippendorff_alpha: expected disagreement is zero");
  return 1.0 - observed / expected;
}

double krippendorff_alpha(const AnnotationSet& annotations, MeasurementLevel level) {
  validate(annotations);
  if (annotations.annotators.size() < 2) throw ValidationError("krippendorff_alpha needs at least two annotators");
  const std::size_t units = annotations.annotators.begin()->second.size();
  ReliabilityTable table(units);
  for (const auto& [id, seq] : annotations.annotators) {
    for (std::size_t u = 0; u < units; ++u) table[u].emplace_back(static_cast<double>(ordinal(seq[u])));
  }
  return krippendorff_alpha(table, level);
}

// ---------------------------------------------------------------------------

namespace {

struct Accumulator {
  CorrelationSummary s;

  void add(const Vector& a, const Vector& b) {
    Vector za;
    Vector zb;
    try {
      za = zscore(a);
      zb = zscore(b);
    } catch (const DegenerateError&) {
      ++s.pairs_skipped;
      return;
    }
    s.tau += kendall_tau(za, zb);
    s.rho += spearman_rho(za, zb);
    ++s.pairs_used;
  }

  CorrelationSummary finish(const char* what) {
    if (s.pairs_used == 0) throw DegenerateError(std::string(what) + ": every pair was degenerate");
    s.tau /= static_cast<double>(s.pairs_used);
    s.rho /= static_cast<double>(s.pairs_used);
    return s;
  }
};

}  // namespace

CorrelationSummary pairwise_correlation(const MetricSeries& prediction, const AnnotationSet& annotations,
                                        const JudgmentMapping& mapping) {
  validate(annotations, prediction.size());
  if (annotations.annotators.empty()) throw ValidationError("pairwise_correlation: no annotators");
  Accumulator acc;
  for (const auto& [id, seq] : annotations.annotators) {
    acc.add(prediction.values, absolute_curve(seq, mapping).values);
  }
  return acc.finish("pairwise_correlation");
}

CorrelationSummary human_upper_bound(const AnnotationSet& annotations, const JudgmentMapping& mapping) {
  validate(annotations);
  if (annotations.annotators.size() < 2) throw ValidationError("human_upper_bound needs at least two annotators");
  std::vector<Vector> curves;
  for (const auto& [id, seq] : annotations.annotators) curves.push_back(absolute_curve(seq, mapping).values);
  Accumulator acc;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t j = i + 1; j < curves.size(); ++j) acc.add(curves[i], curves[j]);
  }
  return acc.finish("human_upper_bound");
}

}  // namespace narr
