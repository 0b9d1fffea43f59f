#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "narr/model.hpp"

namespace narr {

// Trace files are line-delimited JSON: one header object
//   {"story_id":..., "embedding_dim":..., "meta":{...}}
// followed by one object per sentence with keys
//   index, text?, e, avg_ll?, win_ll?, win_emb?, sentiment?, cont?
// Optional fields are omitted rather than written as sentinels. Errors carry
// the 1-based physical line number.

StoryTrace parse_trace(std::istream& in);
StoryTrace read_trace(const std::filesystem::path& path);
void write_trace(const StoryTrace& trace, std::ostream& out);
void write_trace(const StoryTrace& trace, const std::filesystem::path& path);

// Annotation files: a JSON header {"story_id":...} then one line per
// annotator, `<annotator-id> <tok> <tok> ...` with tokens from BD D S I BI.
AnnotationSet parse_annotations(std::istream& in);
AnnotationSet read_annotations(const std::filesystem::path& path);
void write_annotations(const AnnotationSet& annotations, std::ostream& out);
void write_annotations(const AnnotationSet& annotations, const std::filesystem::path& path);

// Gold files: a JSON header {"kind":"salience"|"turning_points","story_id":...,"n":...}.
// Salience bodies list whitespace-separated indices over any number of lines.
// Turning-point bodies have exactly five lines `pos` or `pos, lo, hi`.
GoldLabels parse_gold(std::istream& in);
GoldLabels read_gold(const std::filesystem::path& path);
void write_gold(const GoldLabels& gold, std::ostream& out);
void write_gold(const GoldLabels& gold, const std::filesystem::path& path);

}  // namespace narr
