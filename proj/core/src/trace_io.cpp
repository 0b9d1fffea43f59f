#include "narr/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "narr/error.hpp"
#include "narr/text_io.hpp"

namespace narr {

using ojson = nlohmann::ordered_json;

namespace {

// Returns the next non-blank line; `line_no` tracks physical 1-based lines.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) return true;
  }
  return false;
}

ojson parse_json_line(const std::string& line, std::size_t line_no) {
  try {
    auto j = ojson::parse(line);
    if (!j.is_object()) throw ParseError("expected a JSON object", line_no);
    return j;
  } catch (const ojson::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
  }
}

Vector to_vector(const ojson& j, const char* field, std::size_t line_no) {
  if (!j.is_array()) throw ParseError(std::string("field '") + field + "' must be an array", line_no);
  Vector out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError(std::string("field '") + field + "' must hold numbers", line_no);
    out.push_back(v.get<double>());
  }
  return out;
}

double to_number(const ojson& j, const char* field, std::size_t line_no) {
  if (!j.is_number()) throw ParseError(std::string("field '") + field + "' must be a number", line_no);
  return j.get<double>();
}

std::map<std::string, Vector> to_variant_map(const ojson& j, const char* field, std::size_t line_no) {
  if (!j.is_object()) throw ParseError(std::string("field '") + field + "' must be an object", line_no);
  std::map<std::string, Vector> out;
  for (const auto& [k, v] : j.items()) out.emplace(k, to_vector(v, field, line_no));
  return out;
}

// Accepts sums within 1e-6 of one. Sums further than 1e-12 from one are
// rescaled once; closer sums are kept bit-for-bit so files round-trip.
Vector load_probabilities(Vector p, std::size_t line_no) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("line " + std::to_string(line_no) + ": field 'cont.probs' has a negative or non-finite entry");
    sum += v;
  }
  const double gap = std::abs(sum - 1.0);
  if (gap > 1e-6) {
    throw ValidationError("line " + std::to_string(line_no) + ": field 'cont.probs' sums to " +
                          std::to_string(sum));
  }
  if (gap > 1e-12) {
    for (double& v : p) v /= sum;
  }
  return p;
}

ContinuationSet to_continuations(const ojson& j, std::size_t line_no) {
  if (!j.is_object()) throw ParseError("field 'cont' must be an object", line_no);
  ContinuationSet cont;
  if (!j.contains("n") || !j["n"].is_number_integer()) throw ParseError("field 'cont.n' must be an integer", line_no);
  cont.horizon = j["n"].get<int>();
  if (!j.contains("samples") || !j["samples"].is_array()) {
    throw ParseError("field 'cont.samples' must be an array", line_no);
  }
  for (const auto& s : j["samples"]) {
    if (!s.is_object() || !s.contains("e")) throw ParseError("each cont sample needs 'e'", line_no);
    ContinuationSample sample;
    sample.embedding = to_vector(s["e"], "cont.samples.e", line_no);
    if (s.contains("score")) sample.raw_score = to_number(s["score"], "cont.samples.score", line_no);
    if (s.contains("sentiment")) sample.sentiment = to_number(s["sentiment"], "cont.samples.sentiment", line_no);
    cont.samples.push_back(std::move(sample));
  }
  if (j.contains("probs")) cont.probabilities = load_probabilities(to_vector(j["probs"], "cont.probs", line_no), line_no);
  return cont;
}

ojson vector_json(const Vector& v) {
  ojson arr = ojson::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

ojson record_json(const SentenceRecord& rec) {
  ojson j;
  j["index"] = rec.index;
  if (rec.text) j["text"] = *rec.text;
  j["e"] = vector_json(rec.embedding);
  if (rec.avg_log_likelihood) j["avg_ll"] = *rec.avg_log_likelihood;
  if (!rec.window_token_loglikes.empty()) {
    ojson w = ojson::object();
    for (const auto& [k, v] : rec.window_token_loglikes) w[k] = vector_json(v);
    j["win_ll"] = std::move(w);
  }
  if (!rec.window_embedding.empty()) {
    ojson w = ojson::object();
    for (const auto& [k, v] : rec.window_embedding) w[k] = vector_json(v);
    j["win_emb"] = std::move(w);
  }
  if (rec.sentiment) j["sentiment"] = *rec.sentiment;
  if (rec.continuations) {
    const auto& c = *rec.continuations;
    ojson cj;
    cj["n"] = c.horizon;
    ojson samples = ojson::array();
    for (const auto& s : c.samples) {
      ojson sj;
      sj["e"] = vector_json(s.embedding);
      if (s.raw_score) sj["score"] = *s.raw_score;
      if (s.sentiment) sj["sentiment"] = *s.sentiment;
      samples.push_back(std::move(sj));
    }
    cj["samples"] = std::move(samples);
    if (c.probabilities) cj["probs"] = vector_json(*c.probabilities);
    j["cont"] = std::move(cj);
  }
  return j;
}

// Prefixes validation errors raised by `fn` with the record's line number.
template <typename Fn>
void with_line(std::size_t line_no, Fn&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
  }
}

}  // namespace

StoryTrace parse_trace(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw ValidationError("trace file is empty");
  const auto header = parse_json_line(line, line_no);

  StoryTrace trace;
  if (!header.contains("story_id") || !header["story_id"].is_string()) {
    throw ParseError("header needs string 'story_id'", line_no);
  }
  trace.story_id = header["story_id"].get<std::string>();
  if (!header.contains("embedding_dim") || !header["embedding_dim"].is_number_unsigned()) {
    throw ParseError("header needs non-negative integer 'embedding_dim'", line_no);
  }
  trace.embedding_dim = header["embedding_dim"].get<std::size_t>();
  if (trace.embedding_dim == 0) throw ValidationError("line 1: field 'embedding_dim' must be positive");
  if (header.contains("meta")) {
    if (!header["meta"].is_object()) throw ParseError("header 'meta' must be an object", line_no);
    for (const auto& [k, v] : header["meta"].items()) {
      if (!v.is_string()) throw ParseError("meta values must be strings", line_no);
      trace.meta.emplace(k, v.get<std::string>());
    }
  }

  while (next_line(in, line, line_no)) {
    const auto j = parse_json_line(line, line_no);
    SentenceRecord rec;
    if (!j.contains("index") || !j["index"].is_number_unsigned()) {
      throw ParseError("record needs non-negative integer 'index'", line_no);
    }
    rec.index = j["index"].get<std::size_t>();
    if (j.contains("text")) {
      if (!j["text"].is_string()) throw ParseError("field 'text' must be a string", line_no);
      rec.text = j["text"].get<std::string>();
    }
    if (!j.contains("e")) throw ParseError("record needs 'e'", line_no);
    rec.embedding = to_vector(j["e"], "e", line_no);
    if (rec.embedding.size() != trace.embedding_dim) {
      throw ValidationError("line " + std::to_string(line_no) + ": field 'e' has length " +
                            std::to_string(rec.embedding.size()) + ", expected embedding_dim " +
                            std::to_string(trace.embedding_dim));
    }
    if (j.contains("avg_ll")) rec.avg_log_likelihood = to_number(j["avg_ll"], "avg_ll", line_no);
    if (j.contains("win_ll")) rec.window_token_loglikes = to_variant_map(j["win_ll"], "win_ll", line_no);
    if (j.contains("win_emb")) rec.window_embedding = to_variant_map(j["win_emb"], "win_emb", line_no);
    if (j.contains("sentiment")) rec.sentiment = to_number(j["sentiment"], "sentiment", line_no);
    if (j.contains("cont")) rec.continuations = to_continuations(j["cont"], line_no);

    const auto expected = trace.sentences.size();
    trace.sentences.push_back(std::move(rec));
    with_line(line_no, [&] {
      const auto& r = trace.sentences.back();
      if (r.index != expected) {
        throw ValidationError("field 'index' is " + std::to_string(r.index) + ", expected " +
                              std::to_string(expected));
      }
      validate(r, trace.embedding_dim);
    });
  }
  validate(trace);
  return trace;
}

StoryTrace read_trace(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_trace(in);
}

void write_trace(const StoryTrace& trace, std::ostream& out) {
  validate(trace);
  ojson header;
  header["story_id"] = trace.story_id;
  header["embedding_dim"] = trace.embedding_dim;
  ojson meta = ojson::object();
  for (const auto& [k, v] : trace.meta) meta[k] = v;
  header["meta"] = std::move(meta);
  out << header.dump() << '\n';
  for (const auto& rec : trace.sentences) out << record_json(rec).dump() << '\n';
}

void write_trace(const StoryTrace& trace, const std::filesystem::path& path) {
  std::ostringstream buf;
  write_trace(trace, buf);
  write_text_file(path, buf.str());
}

// ---------------------------------------------------------------------------

AnnotationSet parse_annotations(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw ValidationError("annotation file is empty");
  const auto header = parse_json_line(line, line_no);
  if (!header.contains("story_id") || !header["story_id"].is_string()) {
    throw ParseError("header needs string 'story_id'", line_no);
  }
  AnnotationSet set;
  set.story_id = header["story_id"].get<std::string>();
  while (next_line(in, line, line_no)) {
    std::istringstream ls(line);
    std::string id;
    ls >> id;
    std::vector<Judgment> seq;
    std::string tok;
    while (ls >> tok) {
      with_line(line_no, [&] { seq.push_back(judgment_from_token(tok)); });
    }
    if (seq.empty()) throw ParseError("annotator '" + id + "' has no judgments", line_no);
    if (!set.annotators.emplace(id, std::move(seq)).second) {
      throw ParseError("duplicate annotator '" + id + "'", line_no);
    }
  }
  if (set.annotators.empty()) throw ValidationError("annotation file has no annotators");
  validate(set);
  return set;
}

AnnotationSet read_annotations(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_annotations(in);
}

void write_annotations(const AnnotationSet& annotations, std::ostream& out) {
  validate(annotations);
  ojson header;
  header["story_id"] = annotations.story_id;
  out << header.dump() << '\n';
  for (const auto& [id, seq] : annotations.annotators) {
    out << id;
    for (auto j : seq) out << ' ' << to_token(j);
    out << '\n';
  }
}

void write_annotations(const AnnotationSet& annotations, const std::filesystem::path& path) {
  std::ostringstream buf;
  write_annotations(annotations, buf);
  write_text_file(path, buf.str());
}

// ---------------------------------------------------------------------------

namespace {

std::size_t parse_index(const std::string& tok, std::size_t line_no) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    if (tok.empty() || tok[0] == '-') throw std::invalid_argument(tok);
    v = std::stoull(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError("expected a sentence index, got '" + tok + "'", line_no);
  }
  if (pos != tok.size()) throw ParseError("expected a sentence index, got '" + tok + "'", line_no);
  return static_cast<std::size_t>(v);
}

}  // namespace

GoldLabels parse_gold(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw ValidationError("gold file is empty");
  const auto header = parse_json_line(line, line_no);
  GoldLabels gold;
  if (!header.contains("kind") || !header["kind"].is_string()) throw ParseError("header needs 'kind'", line_no);
  const auto kind = header["kind"].get<std::string>();
  if (kind == "salience") {
    gold.kind = GoldKind::Salience;
  } else if (kind == "turning_points") {
    gold.kind = GoldKind::TurningPoints;
  } else {
    throw ParseError("unknown gold kind '" + kind + "'", line_no);
  }
  if (header.contains("story_id")) gold.story_id = header["story_id"].get<std::string>();
  if (!header.contains("n") || !header["n"].is_number_unsigned()) {
    throw ParseError("header needs story length 'n'", line_no);
  }
  gold.story_length = header["n"].get<std::size_t>();

  if (gold.kind == GoldKind::Salience) {
    while (next_line(in, line, line_no)) {
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) gold.salient_indices.insert(parse_index(tok, line_no));
    }
  } else {
    std::vector<IndexRange> windows;
    bool any_window = false;
    bool all_windows = true;
    while (next_line(in, line, line_no)) {
      std::vector<std::string> fields;
      std::string field;
      std::istringstream ls(line);
      while (std::getline(ls, field, ',')) {
        const auto b = field.find_first_not_of(" \t");
        const auto e = field.find_last_not_of(" \t");
        fields.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
      }
      if (fields.size() != 1 && fields.size() != 3) {
        throw ParseError("turning point entries are 'pos' or 'pos, lo, hi'", line_no);
      }
      gold.tp_positions.push_back(parse_index(fields[0], line_no));
      if (fields.size() == 3) {
        any_window = true;
        windows.push_back({parse_index(fields[1], line_no), parse_index(fields[2], line_no)});
      } else {
        all_windows = false;
        windows.push_back({});
      }
    }
    if (any_window && !all_windows) throw ValidationError("either every turning point has a window or none does");
    if (any_window) gold.tp_windows = std::move(windows);
  }
  validate(gold);
  return gold;
}

GoldLabels read_gold(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_gold(in);
}

void write_gold(const GoldLabels& gold, std::ostream& out) {
  validate(gold);
  ojson header;
  header["kind"] = gold.kind == GoldKind::Salience ? "salience" : "turning_points";
  header["story_id"] = gold.story_id;
  header["n"] = gold.story_length;
  out << header.dump() << '\n';
  if (gold.kind == GoldKind::Salience) {
    bool first = true;
    for (auto i : gold.salient_indices) {
      out << (first ? "" : " ") << i;
      first = false;
    }
    if (!gold.salient_indices.empty()) out << '\n';
    return;
  }
  for (std::size_t i = 0; i < gold.tp_positions.size(); ++i) {
    out << gold.tp_positions[i];
    if (gold.tp_windows) out << ", " << (*gold.tp_windows)[i].lo << ", " << (*gold.tp_windows)[i].hi;
    out << '\n';
  }
}

void write_gold(const GoldLabels& gold, const std::filesystem::path& path) {
  std::ostringstream buf;
  write_gold(gold, buf);
  write_text_file(path, buf.str());
}

}  // namespace narr
