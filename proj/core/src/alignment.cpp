#include "narr/alignment.hpp"

#include <algorithm>
#include <cmath>

#include "narr/error.hpp"

namespace narr {

void validate(const AlignConfig& cfg) {
  if (!(cfg.window_fraction > 0.0 && cfg.window_fraction <= 1.0)) throw ValidationError("rho must lie in (0, 1]");
  if (!(cfg.min_similarity >= 0.0 && cfg.min_similarity <= 1.0)) throw ValidationError("mu must lie in [0, 1]");
  if (!(cfg.slack >= 0.0)) throw ValidationError("theta must be non-negative");
  if (cfg.max_matches < 1) throw ValidationError("max matches must be >= 1");
}

AlignmentResult align(std::span<const Vector> summary, std::span<const Vector> fulltext, const AlignConfig& cfg) {
  validate(cfg);
  if (summary.empty() || fulltext.empty()) throw ValidationError("align: summary and full text must be non-empty");

  std::vector<Vector> full_unit;
  full_unit.reserve(fulltext.size());
  for (const auto& f : fulltext) full_unit.push_back(normalized(f));

  AlignmentResult result;
  result.labels.kind = GoldKind::Salience;
  result.labels.story_length = fulltext.size();

  // Absorbs rounding in the fractional positions only.
  constexpr double kPositionEps = 1e-12;
  const auto ns = static_cast<double>(summary.size());
  const auto nf = static_cast<double>(fulltext.size());

  for (std::size_t x = 0; x < summary.size(); ++x) {
    const auto s_unit = normalized(summary[x]);
    const double sx = static_cast<double>(x) / ns;
    std::vector<std::pair<double, std::size_t>> window;
    for (std::size_t y = 0; y < fulltext.size(); ++y) {
      if (std::abs(static_cast<double>(y) / nf - sx) > cfg.window_fraction + kPositionEps) continue;
      window.emplace_back(std::clamp(dot(s_unit, full_unit[y]), -1.0, 1.0), y);
    }
    if (window.empty()) {
      ++result.empty_windows;
      continue;
    }
    double best = window.front().first;
    for (const auto& [s, y] : window) best = std::max(best, s);
    std::vector<std::pair<double, std::size_t>> picked;
    for (const auto& c : window) {
      if (c.first >= cfg.min_similarity && c.first >= best - cfg.slack) picked.push_back(c);
    }
    std::stable_sort(picked.begin(), picked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    if (picked.size() > cfg.max_matches) picked.resize(cfg.max_matches);
    for (const auto& [s, y] : picked) {
      result.matches.push_back({x, y, s});
      result.labels.salient_indices.insert(y);
    }
  }
  return result;
}

AlignmentReport alignment_report(const GoldLabels& labels, std::size_t fulltext_length) {
  AlignmentReport r;
  r.sentences = fulltext_length;
  r.labelled = labels.salient_indices.size();
  r.coverage = fulltext_length == 0 ? 0.0 : static_cast<double>(r.labelled) / static_cast<double>(fulltext_length);
  return r;
}

}  // namespace narr
