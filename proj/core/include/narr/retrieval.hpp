#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <list>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "narr/vector_ops.hpp"

namespace narr {

enum class PassageSource { Kb, Memory };

std::string_view to_string(PassageSource s) noexcept;

struct Passage {
  std::string id;
  Vector key;
  std::string payload;
  PassageSource source = PassageSource::Kb;
  std::optional<std::size_t> position;
  std::optional<Vector> token_dist;

  bool operator==(const Passage&) const = default;
};

/// Fixed passage collection (the knowledge base) searched by exact scan.
class PassageStore {
 public:
  explicit PassageStore(std::size_t dim) : dim_(dim) {}

  void add(Passage p);
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept { return passages_.size(); }
  [[nodiscard]] bool empty() const noexcept { return passages_.empty(); }
  [[nodiscard]] const std::vector<Passage>& passages() const noexcept { return passages_; }

 private:
  std::size_t dim_;
  std::vector<Passage> passages_;
};

// Passage store files: a JSON header {"dim":...} then one JSON object per line
// with id, source ("kb"|"memory"), key, payload, and optional position and
// token_dist.
PassageStore parse_passages(std::istream& in);
PassageStore read_passages(const std::filesystem::path& path);
void write_passages(const PassageStore& store, std::ostream& out);
void write_passages(const PassageStore& store, const std::filesystem::path& path);

enum class CachePolicy { Lru, Fifo };

CachePolicy cache_policy_from_string(std::string_view name);

/// Bounded episodic memory. LRU refreshes recency on touch and re-insertion;
/// FIFO evicts strictly by first insertion. Readers may share a const cache;
/// mutation is single-writer.
class MemoryCache {
 public:
  MemoryCache(std::size_t capacity, CachePolicy policy, std::size_t dim);

  /// Inserts or replaces by id, evicting per policy. Returns the evicted id.
  std::optional<std::string> add(Passage p);
  /// Marks `id` as recently used (no-op under FIFO or for unknown ids).
  void touch(const std::string& id);
  /// Clears all entries, as between works at inference time.
  void reset() noexcept;

  [[nodiscard]] bool contains(const std::string& id) const;
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
  [[nodiscard]] CachePolicy policy() const noexcept { return policy_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  /// Entries from next-to-evict to most recently used / inserted.
  [[nodiscard]] std::vector<std::string> ids() const;
  [[nodiscard]] const std::list<Passage>& entries() const noexcept { return entries_; }

 private:
  std::size_t capacity_;
  CachePolicy policy_;
  std::size_t dim_;
  std::list<Passage> entries_;
  std::unordered_map<std::string, std::list<Passage>::iterator> index_;
};

struct ScoredPassage {
  const Passage* passage = nullptr;
  double score = 0.0;
};

/// Dot product relevance.
double score(std::span<const double> query, std::span<const double> key);

/// Exact top-k by descending score; ties by id.
std::vector<ScoredPassage> top_k(std::span<const double> query, std::span<const Passage> passages, std::size_t k);
std::vector<ScoredPassage> top_k(std::span<const double> query, const std::list<Passage>& passages, std::size_t k);

/// Top-z across both sources by descending score; ties prefer the knowledge
/// base, then lower id.
std::vector<ScoredPassage> topk_merge(std::span<const ScoredPassage> kb_hits, std::span<const ScoredPassage> mem_hits,
                                      std::size_t z);

/// Softmax over retrieval scores.
Vector marginal_weights(std::span<const double> scores);

/// sum_z w_z * dist_z.
Vector marginalize_token_dists(std::span<const double> weights, std::span<const Vector> dists);

struct RetrievalResult {
  std::vector<ScoredPassage> hits;
  Vector weights;
};

/// Exact per-source top-k, merge to z, then softmax weights. Pure: callers
/// that want LRU refresh on retrieval touch the memory hits afterwards.
RetrievalResult retrieve(std::span<const double> query, const PassageStore& kb, const MemoryCache& memory,
                         std::size_t k_kb, std::size_t k_mem, std::size_t z);

}  // namespace narr
