#include "narr/cli/tables.hpp"

#include <array>
#include <charconv>

#include "narr/error.hpp"
#include "narr/text_io.hpp"

namespace narr::cli {

namespace {

constexpr std::array<const char*, 13> kResultHeader = {"story_id", "measure", "n",      "tau",        "rho",
                                                       "tau_lo",   "tau_hi",  "rho_lo", "rho_hi",     "D",
                                                       "MAP",      "recall_at_k", "rouge_l"};

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::optional<double> optional_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_number(s);
}

std::size_t parse_index(const std::string& s, std::size_t line) {
  std::size_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw ParseError("bad integer '" + s + "'", line);
  return v;
}

}  // namespace

const MetricSeries& StorySeries::get(std::string_view name) const {
  for (const auto& s : series) {
    if (s.name == name) return s;
  }
  throw ValidationError("story '" + story_id + "' has no series '" + std::string(name) + "'");
}

std::string series_csv(std::span<const StorySeries> stories) {
  CsvTable t;
  t.header = {"story_id", "sentence"};
  if (!stories.empty()) {
    for (const auto& s : stories.front().series) t.header.push_back(s.name);
  }
  for (const auto& story : stories) {
    if (story.series.size() + 2 != t.header.size()) {
      throw ValidationError("story '" + story.story_id + "' has a different metric set");
    }
    for (std::size_t m = 0; m < story.series.size(); ++m) {
      if (story.series[m].name != t.header[m + 2] || story.series[m].size() != story.length()) {
        throw ValidationError("story '" + story.story_id + "' has inconsistent series");
      }
    }
    for (std::size_t i = 0; i < story.length(); ++i) {
      std::vector<std::string> row = {story.story_id, std::to_string(i)};
      for (const auto& s : story.series) row.push_back(format_number(s.values[i]));
      t.rows.push_back(std::move(row));
    }
  }
  return to_csv(t);
}

std::vector<StorySeries> parse_series_csv(std::string_view text) {
  const auto t = parse_csv(text);
  if (t.header.size() < 2 || t.header[0] != "story_id" || t.header[1] != "sentence") {
    throw ParseError("series CSV must start with story_id,sentence", 1);
  }
  std::vector<StorySeries> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::size_t line = r + 2;
    if (out.empty() || out.back().story_id != row[0]) {
      for (const auto& s : out) {
        if (s.story_id == row[0]) throw ParseError("story '" + row[0] + "' rows are not contiguous", line);
      }
      StorySeries s;
      s.story_id = row[0];
      for (std::size_t c = 2; c < t.header.size(); ++c) s.series.push_back({t.header[c], {}, false});
      out.push_back(std::move(s));
    }
    auto& story = out.back();
    if (parse_index(row[1], line) != story.length()) {
      throw ParseError("sentence indices of story '" + row[0] + "' must run 0..n-1", line);
    }
    for (std::size_t c = 2; c < t.header.size(); ++c) {
      try {
        story.series[c - 2].values.push_back(parse_number(row[c]));
      } catch (const ValidationError& e) {
        throw ParseError(e.what(), line);
      }
    }
  }
  return out;
}

std::string results_csv(std::span<const ResultRow> rows) {
  CsvTable t;
  t.header.assign(kResultHeader.begin(), kResultHeader.end());
  for (const auto& r : rows) {
    t.rows.push_back({r.story_id, r.measure, std::to_string(r.n), cell(r.tau), cell(r.rho), cell(r.tau_lo),
                      cell(r.tau_hi), cell(r.rho_lo), cell(r.rho_hi), cell(r.distance), cell(r.map),
                      cell(r.recall_at_k), cell(r.rouge_l)});
  }
  return to_csv(t);
}

std::vector<ResultRow> parse_results_csv(std::string_view text) {
  const auto t = parse_csv(text);
  if (t.header != std::vector<std::string>(kResultHeader.begin(), kResultHeader.end())) {
    throw ParseError("unexpected results header", 1);
  }
  std::vector<ResultRow> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& c = t.rows[r];
    const std::size_t line = r + 2;
    try {
      ResultRow row;
      row.story_id = c[0];
      row.measure = c[1];
      row.n = parse_index(c[2], line);
      row.tau = optional_number(c[3]);
      row.rho = optional_number(c[4]);
      row.tau_lo = optional_number(c[5]);
      row.tau_hi = optional_number(c[6]);
      row.rho_lo = optional_number(c[7]);
      row.rho_hi = optional_number(c[8]);
      row.distance = optional_number(c[9]);
      row.map = optional_number(c[10]);
      row.recall_at_k = optional_number(c[11]);
      row.rouge_l = optional_number(c[12]);
      out.push_back(std::move(row));
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line);
    }
  }
  return out;
}

}  // namespace narr::cli
