#include "narr/cli/commands.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "narr/annotation.hpp"
#include "narr/baseline.hpp"
#include "narr/cli/svg.hpp"
#include "narr/error.hpp"
#include "narr/evaluation.hpp"
#include "narr/parallel.hpp"
#include "narr/synthetic.hpp"
#include "narr/text_io.hpp"
#include "narr/tokenize.hpp"
#include "narr/trace_io.hpp"

namespace narr::cli {

namespace {

constexpr const char* kLikeClus = "like_clus";

std::string story_prefix(const std::string& id) { return "story '" + id + "': "; }

template <typename Map>
const auto& lookup_story(const Map& m, const std::string& id, const char* what) {
  const auto it = m.find(id);
  if (it == m.end()) throw ValidationError(story_prefix(id) + "no " + what + " supplied");
  return it->second;
}

std::vector<std::string> selected_columns(const StorySeries& story, const std::vector<std::string>& wanted) {
  std::vector<std::string> out;
  if (wanted.empty()) {
    for (const auto& s : story.series) out.push_back(s.name);
  } else {
    for (const auto& w : wanted) out.push_back(story.get(w).name);
  }
  return out;
}

std::vector<std::string> columns_of(std::span<const StorySeries> pred, const EvaluateOptions& opts) {
  if (pred.empty()) throw ValidationError("no predictions to evaluate");
  return selected_columns(pred.front(), opts.measures);
}

std::optional<Interval> try_fisher(double r, std::size_t n) {
  try {
    return fisher_ci(r, n);
  } catch (const Error&) {
    return std::nullopt;
  }
}

void set_correlation(ResultRow& row, double tau, double rho) {
  row.tau = tau;
  row.rho = rho;
  if (const auto ci = try_fisher(tau, row.n)) {
    row.tau_lo = ci->lo;
    row.tau_hi = ci->hi;
  }
  if (const auto ci = try_fisher(rho, row.n)) {
    row.rho_lo = ci->lo;
    row.rho_hi = ci->hi;
  }
}

// Mean tau/rho over the rows that have them; n is the pooled sentence count.
ResultRow correlation_aggregate(const std::string& measure, std::span<const ResultRow> rows) {
  ResultRow agg;
  agg.story_id = kAggregateId;
  agg.measure = measure;
  double tau = 0.0;
  double rho = 0.0;
  std::size_t used = 0;
  for (const auto& r : rows) {
    if (!r.tau) continue;
    tau += *r.tau;
    rho += *r.rho;
    agg.n += r.n;
    ++used;
  }
  if (used > 0) set_correlation(agg, tau / static_cast<double>(used), rho / static_cast<double>(used));
  return agg;
}

std::optional<double> mean_of(std::span<const ResultRow> rows, std::optional<double> ResultRow::*field) {
  double sum = 0.0;
  std::size_t used = 0;
  for (const auto& r : rows) {
    if (r.*field) {
      sum += *(r.*field);
      ++used;
    }
  }
  if (used == 0) return std::nullopt;
  return sum / static_cast<double>(used);
}

std::vector<std::string> text_tokens(const StoryTrace& trace, const std::vector<std::size_t>& indices) {
  std::vector<std::string> out;
  for (const auto i : indices) {
    const auto& text = trace.sentences.at(i).text;
    if (!text) return {};
    for (auto& t : tokenize(*text)) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

StorySeries analyze(const StoryTrace& trace, const AnalyzeOptions& opts) {
  StorySeries out;
  out.story_id = trace.story_id;
  for (const auto& m : opts.metrics) {
    try {
      out.series.push_back(metric_series(trace, m, opts.metric));
    } catch (const MissingInputError& e) {
      throw MissingInputError(story_prefix(trace.story_id) + "metric '" + m + "': " + e.what());
    }
  }
  for (const auto& m : opts.measures) {
    auto cfg = opts.salience;
    if (m == kLikeClus) {
      cfg.measure = SalienceMeasure::Like;
      cfg.combine_like_clus = true;
    } else {
      cfg.measure = salience_measure_from_string(m);
      cfg.combine_like_clus = false;
    }
    try {
      out.series.push_back(salience_series(trace, cfg));
    } catch (const MissingInputError& e) {
      throw MissingInputError(story_prefix(trace.story_id) + "measure '" + m + "': " + e.what());
    }
  }
  if (opts.zscore) {
    for (auto& s : out.series) {
      try {
        s = zscore(s);
      } catch (const DegenerateError& e) {
        throw DegenerateError(story_prefix(trace.story_id) + "cannot z-score '" + s.name + "': " + e.what());
      }
    }
  }
  return out;
}

EvalMode eval_mode_from_string(std::string_view name) {
  if (name == "suspense") return EvalMode::Suspense;
  if (name == "turning-points") return EvalMode::TurningPoints;
  if (name == "salience") return EvalMode::Salience;
  throw ValidationError("unknown evaluation mode '" + std::string(name) +
                        "' (expected suspense, turning-points or salience)");
}

std::vector<ResultRow> evaluate_suspense(std::span<const StorySeries> pred,
                                         const std::map<std::string, AnnotationSet>& annotations,
                                         const EvaluateOptions& opts) {
  const auto columns = columns_of(pred, opts);
  for (const auto& story : pred) {
    const auto& ann = lookup_story(annotations, story.story_id, "annotations");
    for (const auto& [who, seq] : ann.annotators) {
      if (seq.size() != story.length()) {
        throw ValidationError(story_prefix(story.story_id) + "prediction has " + std::to_string(story.length()) +
                              " sentences but annotator '" + who + "' judged " + std::to_string(seq.size()));
      }
    }
  }

  std::vector<ResultRow> out;
  auto add_block = [&](const std::string& measure, auto&& correlate) {
    std::vector<ResultRow> rows;
    for (const auto& story : pred) {
      ResultRow row;
      row.story_id = story.story_id;
      row.measure = measure;
      row.n = story.length();
      try {
        const auto c = correlate(story);
        set_correlation(row, c.tau, c.rho);
      } catch (const DegenerateError&) {
        // Constant curve: correlation undefined, cells stay empty.
      }
      rows.push_back(std::move(row));
    }
    out.insert(out.end(), rows.begin(), rows.end());
    out.push_back(correlation_aggregate(measure, rows));
  };

  for (const auto& col : columns) {
    add_block(col, [&](const StorySeries& story) {
      return pairwise_correlation(story.get(col), annotations.at(story.story_id));
    });
  }
  add_block("human", [&](const StorySeries& story) {
    const auto& ann = annotations.at(story.story_id);
    if (ann.annotators.size() < 2) throw DegenerateError("fewer than two annotators");
    return human_upper_bound(ann);
  });
  return out;
}

std::vector<ResultRow> evaluate_turning_points(std::span<const StorySeries> pred,
                                               const std::map<std::string, GoldLabels>& gold,
                                               const EvaluateOptions& opts) {
  const auto columns = columns_of(pred, opts);
  for (const auto& story : pred) {
    const auto& g = lookup_story(gold, story.story_id, "turning-point gold");
    if (g.kind != GoldKind::TurningPoints) {
      throw ValidationError(story_prefix(story.story_id) + "gold file holds salience labels, not turning points");
    }
    if (g.story_length != story.length()) {
      throw ValidationError(story_prefix(story.story_id) + "prediction has " + std::to_string(story.length()) +
                            " sentences, gold expects " + std::to_string(g.story_length));
    }
  }
  std::vector<ResultRow> out;
  for (const auto& col : columns) {
    std::vector<ResultRow> rows;
    for (const auto& story : pred) {
      const auto& g = gold.at(story.story_id);
      const auto windows = g.tp_windows.value_or(
          std::vector<IndexRange>(g.tp_positions.size(), IndexRange{0, story.length() - 1}));
      const auto peaks = find_peaks(story.get(col).values);
      std::vector<std::size_t> predicted;
      for (const auto& tp : assign_turning_points(peaks, windows)) predicted.push_back(tp.index);
      ResultRow row;
      row.story_id = story.story_id;
      row.measure = col;
      row.n = story.length();
      row.distance = tp_distance(predicted, g.tp_positions, story.length());
      rows.push_back(row);
    }
    ResultRow agg;
    agg.story_id = kAggregateId;
    agg.measure = col;
    for (const auto& r : rows) agg.n += r.n;
    agg.distance = mean_of(rows, &ResultRow::distance);
    out.insert(out.end(), rows.begin(), rows.end());
    out.push_back(agg);
  }
  return out;
}

std::vector<ResultRow> evaluate_salience(std::span<const StorySeries> pred, const std::map<std::string, GoldLabels>& gold,
                                         const std::map<std::string, StoryTrace>& traces, const EvaluateOptions& opts) {
  const auto columns = columns_of(pred, opts);
  for (const auto& story : pred) {
    const auto& g = lookup_story(gold, story.story_id, "salience gold");
    if (g.kind != GoldKind::Salience) {
      throw ValidationError(story_prefix(story.story_id) + "gold file holds turning points, not salience labels");
    }
    if (g.story_length != story.length()) {
      throw ValidationError(story_prefix(story.story_id) + "prediction has " + std::to_string(story.length()) +
                            " sentences, gold expects " + std::to_string(g.story_length));
    }
    if (const auto it = traces.find(story.story_id); it != traces.end() && it->second.size() != story.length()) {
      throw ValidationError(story_prefix(story.story_id) + "trace length differs from the prediction");
    }
  }
  std::vector<ResultRow> out;
  for (const auto& col : columns) {
    std::vector<ResultRow> rows;
    for (const auto& story : pred) {
      const auto& g = gold.at(story.story_id);
      const auto& scores = story.get(col).values;
      ResultRow row;
      row.story_id = story.story_id;
      row.measure = col;
      row.n = story.length();
      if (!g.salient_indices.empty()) {
        row.map = average_precision(scores, g.salient_indices);
        row.recall_at_k = recall_at_k(scores, g.salient_indices, opts.k);
        if (const auto it = traces.find(story.story_id); it != traces.end()) {
          const auto order = ranking_order(scores);
          const std::size_t k = std::min(opts.k.value_or(g.salient_indices.size()), order.size());
          std::vector<std::size_t> top(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
          std::sort(top.begin(), top.end());
          const auto predicted = text_tokens(it->second, top);
          const auto reference =
              text_tokens(it->second, std::vector<std::size_t>(g.salient_indices.begin(), g.salient_indices.end()));
          if (!predicted.empty() && !reference.empty()) row.rouge_l = rouge_l(predicted, reference).f1;
        }
      }
      rows.push_back(row);
    }
    ResultRow agg;
    agg.story_id = kAggregateId;
    agg.measure = col;
    for (const auto& r : rows) agg.n += r.n;
    agg.map = mean_of(rows, &ResultRow::map);
    agg.recall_at_k = mean_of(rows, &ResultRow::recall_at_k);
    agg.rouge_l = mean_of(rows, &ResultRow::rouge_l);
    out.insert(out.end(), rows.begin(), rows.end());
    out.push_back(agg);
  }
  return out;
}

// ---------------------------------------------------------------------------
// demo

const std::vector<std::string>& demo_metrics() { return suspense_metric_names(); }

const std::vector<std::string>& demo_measures() {
  static const std::vector<std::string> names = {"like",    "swap", "know_diff", "emb_sal", "emb_surp",
                                                 "clus",    kLikeClus, "random",  "ascending", "descending"};
  return names;
}

std::vector<fs::path> run_demo(const DemoOptions& opts) {
  const auto corpus = make_synthetic_corpus(opts.seed, opts.stories);
  const HashEmbedder embedder{opts.embedding_dim, opts.seed};
  const std::size_t n_stories = corpus.stories.size();

  struct StoryOutput {
    StoryTrace trace;
    StorySeries series;
    GoldLabels silver;
    std::size_t empty_windows = 0;
  };

  const auto results = parallel_map(n_stories, [&](std::size_t i) {
    const auto& story = corpus.stories[i];
    NgramLM lm(2);
    BuildOptions build;
    build.window_tokens = opts.window_tokens;
    build.seed = opts.seed;
    for (std::size_t j = 0; j < n_stories; ++j) {
      if (j == i) continue;
      for (const auto& s : corpus.stories[j].sentences) {
        lm.train(tokenize(s));
        build.continuation_pool.push_back(s);
      }
    }
    StoryOutput o;
    o.trace = build_trace(story.id, story.sentences, embedder, lm, build);

    AnalyzeOptions an;
    an.metrics = demo_metrics();
    an.measures = demo_measures();
    an.salience.rng_seed = opts.seed;
    o.series = analyze(o.trace, an);

    std::vector<Vector> summary;
    std::vector<Vector> full;
    for (const auto& s : story.summary) summary.push_back(embed(s, embedder));
    for (const auto& s : story.sentences) full.push_back(embed(s, embedder));
    auto aligned = align(summary, full);
    aligned.labels.story_id = story.id;
    o.silver = std::move(aligned.labels);
    o.empty_windows = aligned.empty_windows;
    return o;
  });

  std::vector<fs::path> written;
  auto emit = [&](const fs::path& rel, const std::string& contents) {
    write_text_file(opts.out / rel, contents);
    written.push_back(rel);
  };
  auto emit_with = [&](const fs::path& rel, auto&& writer) {
    std::ostringstream buf;
    writer(buf);
    emit(rel, buf.str());
  };

  std::vector<StorySeries> all_series;
  std::map<std::string, AnnotationSet> annotations;
  std::map<std::string, GoldLabels> tp_gold;
  std::map<std::string, GoldLabels> silver;
  std::map<std::string, StoryTrace> traces;
  CsvTable alignment;
  alignment.header = {"story_id", "sentences", "summary_sentences", "labelled", "coverage", "empty_windows"};

  for (std::size_t i = 0; i < n_stories; ++i) {
    const auto& story = corpus.stories[i];
    const auto& o = results[i];
    emit_with(fs::path("traces") / (story.id + ".jsonl"), [&](std::ostream& s) { write_trace(o.trace, s); });
    emit_with(fs::path("annotations") / (story.id + ".ann"),
              [&](std::ostream& s) { write_annotations(story.annotations, s); });
    emit_with(fs::path("gold") / (story.id + ".tp"), [&](std::ostream& s) { write_gold(story.turning_points, s); });
    emit_with(fs::path("gold") / (story.id + ".sal"), [&](std::ostream& s) { write_gold(o.silver, s); });
    const auto report = alignment_report(o.silver, story.sentences.size());
    alignment.rows.push_back({story.id, std::to_string(report.sentences), std::to_string(story.summary.size()),
                              std::to_string(report.labelled), format_number(report.coverage),
                              std::to_string(o.empty_windows)});
    all_series.push_back(o.series);
    annotations[story.id] = story.annotations;
    tp_gold[story.id] = story.turning_points;
    silver[story.id] = o.silver;
    traces[story.id] = o.trace;
  }

  emit("series.csv", series_csv(all_series));
  emit("alignment.csv", to_csv(alignment));

  EvaluateOptions suspense;
  suspense.measures = demo_metrics();
  emit("results_suspense.csv", results_csv(evaluate_suspense(all_series, annotations, suspense)));
  emit("results_turning_points.csv", results_csv(evaluate_turning_points(all_series, tp_gold, suspense)));
  EvaluateOptions sal;
  sal.measures = demo_measures();
  emit("results_salience.csv", results_csv(evaluate_salience(all_series, silver, traces, sal)));

  for (std::size_t i = 0; i < n_stories; ++i) {
    const auto& story = corpus.stories[i];
    StorySeries plotted;
    plotted.story_id = story.id;
    for (const char* name : {"ely_suspense", "ely_surprise", "like"}) plotted.series.push_back(all_series[i].get(name));
    const std::set<std::size_t> stars(story.turning_points.tp_positions.begin(), story.turning_points.tp_positions.end());
    emit(fs::path("plots") / (story.id + ".svg"), render_svg(plotted, stars));
  }
  return written;
}

// ---------------------------------------------------------------------------
// command line

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return 3;
    case ErrorKind::Degenerate: return 4;
    case ErrorKind::Validation:
    case ErrorKind::Parse:
    case ErrorKind::MissingInput: return 2;
  }
  return 2;
}

void write_or_print(const std::string& out_path, const std::string& contents, std::ostream& out) {
  if (out_path.empty()) {
    out << contents;
  } else {
    write_text_file(out_path, contents);
  }
}

Vector parse_vector(const std::string& text) {
  Vector v;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ValidationError("empty component in vector '" + text + "'");
    v.push_back(parse_number(std::string_view(item).substr(b, e - b + 1)));
  }
  if (v.empty()) throw ValidationError("empty vector");
  return v;
}

std::vector<std::string> read_sentences(const std::string& path) {
  std::vector<std::string> out;
  std::istringstream in(read_text_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(line);
  }
  return out;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Narrative suspense, surprise and salience analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "narr 0.1.0");

  // analyze
  std::vector<std::string> traces;
  std::vector<std::string> metrics;
  std::vector<std::string> measures;
  std::string distance = "sql2";
  int horizon = 1;
  bool alpha = false;
  bool alpha_floor = false;
  bool imp = false;
  bool zscore_flag = false;
  std::uint64_t seed = 7;
  std::size_t window_tokens = 128;
  std::string out_path;

  auto* analyze_cmd = app.add_subcommand("analyze", "Per-sentence metric curves from traces (CSV)");
  analyze_cmd->add_option("--trace", traces, "Trace file(s)")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--metrics", metrics, "Suspense/surprise metrics")->delimiter(',');
  analyze_cmd->add_option("--measures", measures, "Salience measures")->delimiter(',');
  analyze_cmd->add_option("--distance", distance, "l1, l2, sql2 or cosine");
  analyze_cmd->add_option("--horizon", horizon, "Continuation horizon");
  analyze_cmd->add_flag("--alpha", alpha, "Sentiment-weight Ely surprise and suspense");
  analyze_cmd->add_flag("--alpha-floor", alpha_floor, "Use 1 + |s| as the sentiment factor");
  analyze_cmd->add_flag("--imp", imp, "Scale salience by 1 + |sentiment|");
  analyze_cmd->add_flag("--zscore", zscore_flag, "Standardize every column");
  analyze_cmd->add_option("--seed", seed, "Seed for the random baseline");
  analyze_cmd->add_option("--window-tokens", window_tokens, "Expected window length");
  analyze_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

  // evaluate
  std::string mode = "suspense";
  std::string pred_path;
  std::vector<std::string> annotation_paths;
  std::vector<std::string> gold_paths;
  std::optional<std::size_t> k;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against annotations or gold labels");
  evaluate_cmd->add_option("--mode", mode, "suspense, turning-points or salience");
  evaluate_cmd->add_option("--pred", pred_path, "Series CSV")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--annotations", annotation_paths, "Annotation file(s)")->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--gold", gold_paths, "Gold label file(s)")->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--trace", traces, "Trace file(s) with text, for ROUGE-L")->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--measures", measures, "Columns to evaluate (default all)")->delimiter(',');
  evaluate_cmd->add_option("--k", k, "Recall cutoff (default |gold|)");
  evaluate_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

  // align
  std::string summary_path;
  std::string fulltext_path;
  AlignConfig align_cfg;
  auto* align_cmd = app.add_subcommand("align", "Silver salience labels from a summary trace");
  align_cmd->add_option("--summary", summary_path, "Summary trace")->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--trace", fulltext_path, "Full-text trace")->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--mu", align_cfg.min_similarity, "Minimum similarity");
  align_cmd->add_option("--theta", align_cfg.slack, "Slack below the best match");
  align_cmd->add_option("--rho", align_cfg.window_fraction, "Relative position window");
  align_cmd->add_option("--max-matches", align_cfg.max_matches, "Matches kept per summary sentence");
  align_cmd->add_option("--out", out_path, "Gold label file (default stdout)");

  // plot
  std::string plot_dir;
  auto* plot_cmd = app.add_subcommand("plot", "One SVG per story from a series CSV");
  plot_cmd->add_option("--pred", pred_path, "Series CSV")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--gold", gold_paths, "Gold label file(s) for star markers")->check(CLI::ExistingFile);
  plot_cmd->add_option("--metrics", metrics, "Columns to draw (default all)")->delimiter(',');
  plot_cmd->add_option("--out", plot_dir, "Output directory")->required();

  // demo
  DemoOptions demo;
  std::string demo_out = "demo_out";
  auto* demo_cmd = app.add_subcommand("demo", "Full synthetic pipeline run");
  demo_cmd->add_option("--seed", demo.seed, "Corpus and embedding seed");
  demo_cmd->add_option("--window-tokens", demo.window_tokens, "Likelihood window length");
  demo_cmd->add_option("--stories", demo.stories, "Generated stories besides the pivot story");
  demo_cmd->add_option("--out", demo_out, "Output directory");

  // build
  std::string text_path;
  std::string story_id;
  std::string background_path;
  int lm_order = 2;
  std::size_t dim = 32;
  std::size_t samples = 8;
  auto* build_cmd = app.add_subcommand("build", "Baseline trace from plain text (one sentence per line)");
  build_cmd->add_option("--text", text_path, "Story text")->required()->check(CLI::ExistingFile);
  build_cmd->add_option("--story-id", story_id, "Story id (default file stem)");
  build_cmd->add_option("--background", background_path, "Training and continuation sentences")
      ->check(CLI::ExistingFile);
  build_cmd->add_option("--lm-order", lm_order, "1 or 2");
  build_cmd->add_option("--dim", dim, "Embedding dimension");
  build_cmd->add_option("--samples", samples, "Continuations per sentence");
  build_cmd->add_option("--seed", seed, "Embedding and sampling seed");
  build_cmd->add_option("--window-tokens", window_tokens, "Likelihood window length");
  build_cmd->add_option("--out", out_path, "Trace file (default stdout)");

  // retrieve
  std::string kb_path;
  std::string memory_path;
  std::string query;
  std::size_t capacity = 64;
  std::string policy = "lru";
  std::size_t top = 5;
  std::optional<std::size_t> z;
  auto* retrieve_cmd = app.add_subcommand("retrieve", "Dense top-k lookup over a knowledge base and memory");
  retrieve_cmd->add_option("--kb", kb_path, "Knowledge base passages")->required()->check(CLI::ExistingFile);
  retrieve_cmd->add_option("--memory", memory_path, "Passages loaded into the memory cache in order")
      ->check(CLI::ExistingFile);
  retrieve_cmd->add_option("--capacity", capacity, "Memory capacity");
  retrieve_cmd->add_option("--policy", policy, "lru or fifo");
  retrieve_cmd->add_option("--query", query, "Comma-separated query vector")->required();
  retrieve_cmd->add_option("--k", top, "Hits per source");
  retrieve_cmd->add_option("--z", z, "Merged hits (default k)");
  retrieve_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << "narr 0.1.0\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (analyze_cmd->parsed()) {
      AnalyzeOptions opts;
      opts.metrics = metrics;
      opts.measures = measures;
      if (opts.metrics.empty() && opts.measures.empty()) throw ValidationError("select --metrics and/or --measures");
      opts.metric.distance = distance_kind_from_string(distance);
      opts.metric.horizon = horizon;
      opts.metric.alpha_enabled = alpha;
      opts.metric.alpha_floor = alpha_floor;
      opts.salience.imp_adjust = imp;
      opts.salience.rng_seed = seed;
      opts.salience.window_tokens = window_tokens;
      opts.zscore = zscore_flag;
      std::vector<StorySeries> rows;
      for (const auto& t : traces) rows.push_back(analyze(read_trace(t), opts));
      write_or_print(out_path, series_csv(rows), out);
    } else if (evaluate_cmd->parsed()) {
      const auto pred = parse_series_csv(read_text_file(pred_path));
      EvaluateOptions opts;
      opts.mode = eval_mode_from_string(mode);
      opts.measures = measures;
      opts.k = k;
      std::vector<ResultRow> rows;
      if (opts.mode == EvalMode::Suspense) {
        if (annotation_paths.empty()) throw ValidationError("suspense evaluation needs --annotations");
        std::map<std::string, AnnotationSet> ann;
        for (const auto& p : annotation_paths) {
          auto a = read_annotations(p);
          ann[a.story_id] = std::move(a);
        }
        rows = evaluate_suspense(pred, ann, opts);
      } else {
        if (gold_paths.empty()) throw ValidationError("this evaluation mode needs --gold");
        std::map<std::string, GoldLabels> gold;
        for (const auto& p : gold_paths) {
          auto g = read_gold(p);
          gold[g.story_id] = std::move(g);
        }
        if (opts.mode == EvalMode::TurningPoints) {
          rows = evaluate_turning_points(pred, gold, opts);
        } else {
          std::map<std::string, StoryTrace> by_id;
          for (const auto& t : traces) {
            auto tr = read_trace(t);
            by_id[tr.story_id] = std::move(tr);
          }
          rows = evaluate_salience(pred, gold, by_id, opts);
        }
      }
      write_or_print(out_path, results_csv(rows), out);
    } else if (align_cmd->parsed()) {
      const auto summary = read_trace(summary_path);
      const auto full = read_trace(fulltext_path);
      std::vector<Vector> s;
      std::vector<Vector> f;
      for (const auto& r : summary.sentences) s.push_back(r.embedding);
      for (const auto& r : full.sentences) f.push_back(r.embedding);
      auto result = align(s, f, align_cfg);
      result.labels.story_id = full.story_id;
      std::ostringstream gold;
      write_gold(result.labels, gold);
      write_or_print(out_path, gold.str(), out);
      const auto report = alignment_report(result.labels, full.size());
      (out_path.empty() ? err : out) << "aligned " << report.labelled << " of " << report.sentences
                                     << " sentences (coverage " << format_number(report.coverage) << "), "
                                     << result.empty_windows << " empty windows\n";
    } else if (plot_cmd->parsed()) {
      const auto pred = parse_series_csv(read_text_file(pred_path));
      std::map<std::string, std::set<std::size_t>> stars;
      for (const auto& p : gold_paths) {
        const auto g = read_gold(p);
        stars[g.story_id] = g.kind == GoldKind::Salience
                                ? g.salient_indices
                                : std::set<std::size_t>(g.tp_positions.begin(), g.tp_positions.end());
      }
      for (const auto& story : pred) {
        StorySeries shown;
        shown.story_id = story.story_id;
        for (const auto& name : selected_columns(story, metrics)) shown.series.push_back(story.get(name));
        const auto it = stars.find(story.story_id);
        write_text_file(fs::path(plot_dir) / (story.story_id + ".svg"),
                        render_svg(shown, it == stars.end() ? std::set<std::size_t>{} : it->second));
      }
    } else if (demo_cmd->parsed()) {
      demo.out = demo_out;
      const auto files = run_demo(demo);
      out << "wrote " << files.size() << " files to " << demo.out.string() << '\n';
    } else if (build_cmd->parsed()) {
      const auto sentences = read_sentences(text_path);
      NgramLM lm(lm_order);
      BuildOptions opts;
      opts.window_tokens = window_tokens;
      opts.continuations_per_sentence = samples;
      opts.seed = seed;
      if (!background_path.empty()) {
        for (const auto& s : read_sentences(background_path)) {
          lm.train(tokenize(s));
          opts.continuation_pool.push_back(s);
        }
      }
      const auto id = story_id.empty() ? fs::path(text_path).stem().string() : story_id;
      const auto trace = build_trace(id, sentences, HashEmbedder{dim, seed}, lm, opts);
      std::ostringstream buf;
      write_trace(trace, buf);
      write_or_print(out_path, buf.str(), out);
    } else if (retrieve_cmd->parsed()) {
      const auto kb = read_passages(kb_path);
      MemoryCache memory(capacity, cache_policy_from_string(policy), kb.dim());
      if (!memory_path.empty()) {
        const auto stored = read_passages(memory_path);
        for (const auto& p : stored.passages()) memory.add(p);
      }
      const auto q = parse_vector(query);
      const auto result = retrieve(q, kb, memory, top, top, z.value_or(top));
      CsvTable t;
      t.header = {"rank", "id", "source", "score", "weight"};
      for (std::size_t i = 0; i < result.hits.size(); ++i) {
        const auto& h = result.hits[i];
        t.rows.push_back({std::to_string(i + 1), h.passage->id, std::string(to_string(h.passage->source)),
                          format_number(h.score), format_number(result.weights[i])});
      }
      write_or_print(out_path, to_csv(t), out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace narr::cli
