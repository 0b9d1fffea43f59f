#include "narr/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "narr/error.hpp"

namespace narr {

namespace {

void require_pairable(std::span<const double> x, std::span<const double> y, const char* what) {
  if (x.size() != y.size()) throw ValidationError(std::string(what) + ": length mismatch");
  if (x.size() < 2) throw ValidationError(std::string(what) + ": needs at least two observations");
}

// Sum of t(t-1)/2 over runs of equal adjacent values.
template <typename Eq>
std::int64_t tied_pairs(std::size_t n, Eq&& equal_to_prev) {
  std::int64_t total = 0;
  std::int64_t run = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (equal_to_prev(i)) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total + run * (run - 1) / 2;
}

// Stable merge sort of `v` counting strictly inverted pairs.
std::int64_t sort_counting_inversions(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                                      std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = sort_counting_inversions(v, buf, lo, mid) + sort_counting_inversions(v, buf, mid, hi);
  std::size_t i = lo;
  std::size_t j = mid;
  std::size_t k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  require_pairable(x, y, "kendall_tau");
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  const std::int64_t pairs = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t tx = tied_pairs(n, [&](std::size_t i) { return x[order[i]] == x[order[i - 1]]; });
  const std::int64_t txy = tied_pairs(n, [&](std::size_t i) {
    return x[order[i]] == x[order[i - 1]] && y[order[i]] == y[order[i - 1]];
  });

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  std::vector<double> buf(n);
  const std::int64_t discordant = sort_counting_inversions(ys, buf, 0, n);
  const std::int64_t ty = tied_pairs(n, [&](std::size_t i) { return ys[i] == ys[i - 1]; });

  if (pairs - tx == 0 || pairs - ty == 0) throw DegenerateError("kendall_tau: an input is entirely tied");
  // Untied-in-both pairs are either concordant or discordant.
  const std::int64_t concordant_minus_discordant = pairs - tx - ty + txy - 2 * discordant;
  return static_cast<double>(concordant_minus_discordant) /
         std::sqrt(static_cast<double>(pairs - tx) * static_cast<double>(pairs - ty));
}

Vector average_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  Vector ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  require_pairable(x, y, "spearman_rho");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateError("spearman_rho: an input is entirely tied");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Interval fisher_ci(double r, std::size_t n, double confidence) {
  if (n <= 3) throw DegenerateError("fisher_ci needs n > 3");
  if (!(std::abs(r) < 1.0)) throw DegenerateError("fisher_ci undefined for |r| >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ValidationError("fisher_ci: confidence must lie in (0, 1)");
  const boost::math::normal_distribution<double> normal;
  const double z = boost::math::quantile(normal, 0.5 + confidence / 2.0);
  const double centre = std::atanh(r);
  const double half = z / std::sqrt(static_cast<double>(n) - 3.0);
  return {std::tanh(centre - half), std::tanh(centre + half)};
}

// ---------------------------------------------------------------------------

std::vector<Peak> find_peaks(std::span<const double> x) {
  std::vector<Peak> peaks;
  const std::size_t n = x.size();
  if (n < 3) return peaks;
  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(x[i - 1] < x[i])) {
      ++i;
      continue;
    }
    std::size_t ahead = i + 1;
    while (ahead + 1 < n && x[ahead] == x[i]) ++ahead;
    if (x[ahead] < x[i]) {
      const double h = x[i];
      double left_min = h;
      for (std::size_t k = i + 1; k-- > 0 && x[k] <= h;) left_min = std::min(left_min, x[k]);
      double right_min = h;
      for (std::size_t k = i; k < n && x[k] <= h; ++k) right_min = std::min(right_min, x[k]);
      peaks.push_back({i, h, h - std::max(left_min, right_min)});
    }
    i = ahead;
  }
  return peaks;
}

std::vector<TurningPoint> assign_turning_points(std::span<const Peak> peaks, std::span<const IndexRange> windows) {
  std::vector<TurningPoint> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    if (w.lo > w.hi) throw ValidationError("turning point window has lo > hi");
    const Peak* best = nullptr;
    for (const auto& p : peaks) {
      if (p.index < w.lo || p.index > w.hi) continue;
      if (!best || p.prominence > best->prominence || (p.prominence == best->prominence && p.index < best->index)) {
        best = &p;
      }
    }
    if (best) {
      out.push_back({best->index, false});
    } else {
      out.push_back({w.lo + (w.hi - w.lo) / 2, true});
    }
  }
  return out;
}

double tp_distance(std::span<const std::size_t> predicted, std::span<const std::size_t> gold, std::size_t n) {
  if (n == 0) throw ValidationError("tp_distance: story length must be positive");
  if (predicted.size() != gold.size() || predicted.empty()) {
    throw ValidationError("tp_distance: predicted and gold turning points differ in count");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] >= n || gold[i] >= n) throw ValidationError("tp_distance: index out of bounds");
    const auto diff = predicted[i] > gold[i] ? predicted[i] - gold[i] : gold[i] - predicted[i];
    total += static_cast<double>(diff) / static_cast<double>(n);
  }
  return 100.0 * total / static_cast<double>(predicted.size());
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> ranking_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

double average_precision(std::span<const double> scores, const std::set<std::size_t>& gold,
                         std::optional<std::size_t> cutoff) {
  if (gold.empty()) throw ValidationError("average_precision: gold set is empty");
  for (auto g : gold) {
    if (g >= scores.size()) throw ValidationError("average_precision: gold index out of bounds");
  }
  const auto order = ranking_order(scores);
  const std::size_t limit = cutoff ? std::min(*cutoff, order.size()) : order.size();
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < limit; ++rank) {
    if (gold.count(order[rank])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  return sum / static_cast<double>(gold.size());
}

double mean_average_precision(std::span<const double> average_precisions) {
  if (average_precisions.empty()) throw ValidationError("mean_average_precision: no chapters");
  return std::accumulate(average_precisions.begin(), average_precisions.end(), 0.0) /
         static_cast<double>(average_precisions.size());
}

double recall_at_k(std::span<const double> scores, const std::set<std::size_t>& gold, std::optional<std::size_t> k) {
  if (gold.empty()) throw ValidationError("recall_at_k: gold set is empty");
  const std::size_t cut = k.value_or(gold.size());
  if (cut == 0) throw ValidationError("recall_at_k: k must be at least 1");
  const auto order = ranking_order(scores);
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < std::min(cut, order.size()); ++rank) hits += gold.count(order[rank]);
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

RougeScore rouge_l(std::span<const std::string> predicted, std::span<const std::string> reference) {
  if (predicted.empty() || reference.empty()) throw ValidationError("rouge_l: empty token sequence");
  const auto lcs = static_cast<double>(lcs_length(predicted, reference));
  RougeScore s;
  s.precision = lcs / static_cast<double>(predicted.size());
  s.recall = lcs / static_cast<double>(reference.size());
  s.f1 = lcs == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

}  // namespace narr
