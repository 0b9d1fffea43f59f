#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "narr/model.hpp"

namespace narr::cli {

/// All curves computed for one story, in column order.
struct StorySeries {
  std::string story_id;
  std::vector<MetricSeries> series;

  [[nodiscard]] std::size_t length() const noexcept { return series.empty() ? 0 : series.front().size(); }
  /// Throws ValidationError when `name` is not a column.
  [[nodiscard]] const MetricSeries& get(std::string_view name) const;

  bool operator==(const StorySeries&) const = default;
};

/// story_id,sentence,<metric...>; every story must carry the same metrics.
std::string series_csv(std::span<const StorySeries> stories);
/// Stories in order of first appearance; sentence indices must run 0..n-1.
std::vector<StorySeries> parse_series_csv(std::string_view text);

/// One line of an evaluation table; absent values are empty cells.
struct ResultRow {
  std::string story_id;
  std::string measure;
  std::size_t n = 0;
  std::optional<double> tau, rho, tau_lo, tau_hi, rho_lo, rho_hi;
  std::optional<double> distance;
  std::optional<double> map, recall_at_k, rouge_l;

  bool operator==(const ResultRow&) const = default;
};

inline constexpr const char* kAggregateId = "ALL";

std::string results_csv(std::span<const ResultRow> rows);
std::vector<ResultRow> parse_results_csv(std::string_view text);

}  // namespace narr::cli
