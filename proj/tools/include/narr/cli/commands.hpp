#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "narr/alignment.hpp"
#include "narr/cli/tables.hpp"
#include "narr/metrics.hpp"
#include "narr/model.hpp"
#include "narr/retrieval.hpp"
#include "narr/salience.hpp"

namespace narr::cli {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  std::vector<std::string> metrics;   ///< suspense/surprise metric names
  std::vector<std::string> measures;  ///< salience measure names
  MetricConfig metric;
  SalienceConfig salience;
  bool zscore = false;
};

/// One column per selected metric then per measure. A metric without inputs
/// fails with an error naming the metric and story.
StorySeries analyze(const StoryTrace& trace, const AnalyzeOptions& opts);

// ---------------------------------------------------------------------------
// evaluate

enum class EvalMode { Suspense, TurningPoints, Salience };

EvalMode eval_mode_from_string(std::string_view name);

struct EvaluateOptions {
  EvalMode mode = EvalMode::Suspense;
  /// Columns to evaluate; empty means every column.
  std::vector<std::string> measures;
  /// Recall cutoff; defaults to the gold set size.
  std::optional<std::size_t> k;
};

/// Per-story rows then one aggregate row per measure. Stories appear in
/// prediction order.
std::vector<ResultRow> evaluate_suspense(std::span<const StorySeries> pred,
                                         const std::map<std::string, AnnotationSet>& annotations,
                                         const EvaluateOptions& opts);
std::vector<ResultRow> evaluate_turning_points(std::span<const StorySeries> pred,
                                               const std::map<std::string, GoldLabels>& gold,
                                               const EvaluateOptions& opts);
/// ROUGE-L compares the top-ranked sentences with the gold sentences when the
/// story's trace (with text) is supplied.
std::vector<ResultRow> evaluate_salience(std::span<const StorySeries> pred, const std::map<std::string, GoldLabels>& gold,
                                         const std::map<std::string, StoryTrace>& traces, const EvaluateOptions& opts);

// ---------------------------------------------------------------------------
// demo

struct DemoOptions {
  std::uint64_t seed = 7;
  std::size_t stories = 6;
  std::size_t window_tokens = 128;
  std::size_t embedding_dim = 32;
  fs::path out = "demo_out";
};

/// Synthetic corpus -> traces -> series -> evaluation -> plots under `out`.
/// Returns the files written, relative to `out`, in a fixed order.
std::vector<fs::path> run_demo(const DemoOptions& opts);

/// Metric and measure columns the demo computes.
const std::vector<std::string>& demo_metrics();
const std::vector<std::string>& demo_measures();

// ---------------------------------------------------------------------------

/// Entry point for the `narr` executable. Returns the process exit code:
/// 0 success, 2 validation or parse error, 3 I/O error, 4 degenerate statistics.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace narr::cli
