#include "narr/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "narr/error.hpp"
#include "narr/metrics.hpp"
#include "narr/model.hpp"
#include "narr/text_io.hpp"

namespace narr {

std::string_view to_string(PassageSource s) noexcept { return s == PassageSource::Kb ? "kb" : "memory"; }

namespace {

void check_passage(const Passage& p, std::size_t dim) {
  if (p.key.size() != dim) {
    throw ValidationError("passage '" + p.id + "' key has dimension " + std::to_string(p.key.size()) +
                          ", store expects " + std::to_string(dim));
  }
  if (p.token_dist && !is_probability_vector(*p.token_dist)) {
    throw ValidationError("passage '" + p.id + "' token_dist is not a probability vector");
  }
}

bool by_score_then_id(const ScoredPassage& a, const ScoredPassage& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.passage->id < b.passage->id;
}

template <typename Range>
std::vector<ScoredPassage> scan(std::span<const double> query, const Range& passages, std::size_t k) {
  std::vector<ScoredPassage> all;
  for (const auto& p : passages) all.push_back({&p, score(query, p.key)});
  const auto keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), by_score_then_id);
  all.resize(keep);
  return all;
}

}  // namespace

void PassageStore::add(Passage p) {
  check_passage(p, dim_);
  passages_.push_back(std::move(p));
}

PassageStore parse_passages(std::istream& in) {
  using json = nlohmann::json;
  std::string line;
  std::size_t line_no = 0;
  std::optional<PassageStore> store;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw ParseError("expected a JSON object", line_no);
    if (!store) {
      if (!j.contains("dim") || !j["dim"].is_number_unsigned() || j["dim"].get<std::size_t>() == 0) {
        throw ParseError("header needs positive integer 'dim'", line_no);
      }
      store.emplace(j["dim"].get<std::size_t>());
      continue;
    }
    try {
      Passage p;
      p.id = j.at("id").get<std::string>();
      const auto source = j.value("source", std::string("kb"));
      if (source == "kb") {
        p.source = PassageSource::Kb;
      } else if (source == "memory") {
        p.source = PassageSource::Memory;
      } else {
        throw ParseError("unknown passage source '" + source + "'", line_no);
      }
      p.key = j.at("key").get<Vector>();
      p.payload = j.value("payload", std::string());
      if (j.contains("position")) p.position = j["position"].get<std::size_t>();
      if (j.contains("token_dist")) p.token_dist = j["token_dist"].get<Vector>();
      store->add(std::move(p));
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad passage record: ") + e.what(), line_no);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!store) throw ValidationError("passage file is empty");
  return std::move(*store);
}

PassageStore read_passages(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_passages(in);
}

void write_passages(const PassageStore& store, std::ostream& out) {
  using ojson = nlohmann::ordered_json;
  ojson header;
  header["dim"] = store.dim();
  out << header.dump() << '\n';
  for (const auto& p : store.passages()) {
    ojson j;
    j["id"] = p.id;
    j["source"] = std::string(to_string(p.source));
    j["key"] = p.key;
    j["payload"] = p.payload;
    if (p.position) j["position"] = *p.position;
    if (p.token_dist) j["token_dist"] = *p.token_dist;
    out << j.dump() << '\n';
  }
}

void write_passages(const PassageStore& store, const std::filesystem::path& path) {
  std::ostringstream buf;
  write_passages(store, buf);
  write_text_file(path, buf.str());
}

CachePolicy cache_policy_from_string(std::string_view name) {
  if (name == "lru") return CachePolicy::Lru;
  if (name == "fifo") return CachePolicy::Fifo;
  throw ValidationError("unknown cache policy '" + std::string(name) + "' (expected lru or fifo)");
}

// ---------------------------------------------------------------------------

MemoryCache::MemoryCache(std::size_t capacity, CachePolicy policy, std::size_t dim)
    : capacity_(capacity), policy_(policy), dim_(dim) {
  if (capacity_ == 0) throw ValidationError("memory cache capacity must be positive");
}

std::optional<std::string> MemoryCache::add(Passage p) {
  check_passage(p, dim_);
  p.source = PassageSource::Memory;
  if (const auto it = index_.find(p.id); it != index_.end()) {
    *it->second = std::move(p);
    if (policy_ == CachePolicy::Lru) entries_.splice(entries_.end(), entries_, it->second);
    return std::nullopt;
  }
  std::optional<std::string> evicted;
  if (entries_.size() == capacity_) {
    evicted = entries_.front().id;
    index_.erase(entries_.front().id);
    entries_.pop_front();
  }
  entries_.push_back(std::move(p));
  index_.emplace(entries_.back().id, std::prev(entries_.end()));
  return evicted;
}

void MemoryCache::touch(const std::string& id) {
  if (policy_ != CachePolicy::Lru) return;
  if (const auto it = index_.find(id); it != index_.end()) entries_.splice(entries_.end(), entries_, it->second);
}

void MemoryCache::reset() noexcept {
  entries_.clear();
  index_.clear();
}

bool MemoryCache::contains(const std::string& id) const { return index_.count(id) != 0; }

std::vector<std::string> MemoryCache::ids() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& p : entries_) out.push_back(p.id);
  return out;
}

// ---------------------------------------------------------------------------

double score(std::span<const double> query, std::span<const double> key) { return dot(query, key); }

std::vector<ScoredPassage> top_k(std::span<const double> query, std::span<const Passage> passages, std::size_t k) {
  return scan(query, passages, k);
}

std::vector<ScoredPassage> top_k(std::span<const double> query, const std::list<Passage>& passages, std::size_t k) {
  return scan(query, passages, k);
}

std::vector<ScoredPassage> topk_merge(std::span<const ScoredPassage> kb_hits, std::span<const ScoredPassage> mem_hits,
                                      std::size_t z) {
  if (z == 0) throw ValidationError("topk_merge: z must be at least 1");
  if (kb_hits.empty() && mem_hits.empty()) throw ValidationError("topk_merge: no hits from either source");
  struct Tagged {
    ScoredPassage hit;
    int source_rank;
  };
  std::vector<Tagged> all;
  for (const auto& h : kb_hits) all.push_back({h, 0});
  for (const auto& h : mem_hits) all.push_back({h, 1});
  std::stable_sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
    if (a.hit.score != b.hit.score) return a.hit.score > b.hit.score;
    if (a.source_rank != b.source_rank) return a.source_rank < b.source_rank;
    return a.hit.passage->id < b.hit.passage->id;
  });
  std::vector<ScoredPassage> out;
  for (std::size_t i = 0; i < std::min(z, all.size()); ++i) out.push_back(all[i].hit);
  return out;
}

Vector marginal_weights(std::span<const double> scores) { return softmax(scores); }

Vector marginalize_token_dists(std::span<const double> weights, std::span<const Vector> dists) {
  if (weights.size() != dists.size() || dists.empty()) {
    throw ValidationError("marginalize_token_dists: weight count differs from distribution count");
  }
  if (!is_probability_vector(Vector(weights.begin(), weights.end()))) {
    throw ValidationError("marginalize_token_dists: weights are not a probability vector");
  }
  const std::size_t vocab = dists.front().size();
  Vector out(vocab, 0.0);
  for (std::size_t z = 0; z < dists.size(); ++z) {
    if (dists[z].size() != vocab || !is_probability_vector(dists[z])) {
      throw ValidationError("marginalize_token_dists: passage " + std::to_string(z) + " has an invalid distribution");
    }
    for (std::size_t v = 0; v < vocab; ++v) out[v] += weights[z] * dists[z][v];
  }
  return out;
}

RetrievalResult retrieve(std::span<const double> query, const PassageStore& kb, const MemoryCache& memory,
                         std::size_t k_kb, std::size_t k_mem, std::size_t z) {
  if (kb.empty() && memory.size() == 0) throw ValidationError("retrieve: both stores are empty");
  if (query.size() != kb.dim() || query.size() != memory.dim()) {
    throw ValidationError("retrieve: query dimension does not match the stores");
  }
  const auto kb_hits = top_k(query, std::span<const Passage>(kb.passages()), k_kb);
  const auto mem_hits = top_k(query, memory.entries(), k_mem);
  RetrievalResult r;
  r.hits = topk_merge(kb_hits, mem_hits, z);
  Vector scores;
  for (const auto& h : r.hits) scores.push_back(h.score);
  r.weights = marginal_weights(scores);
  return r;
}

}  // namespace narr
