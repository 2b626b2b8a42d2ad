#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ctrag {

struct RankedEntry {
  std::string item_id;
  double score = 0.0;

  bool operator==(const RankedEntry&) const = default;
};

/// Ordered scored ids: scores finite and non-increasing, ids distinct, ties broken
/// by ascending id. Every retrieval stage hands one of these to the next.
class RankedList {
 public:
  RankedList() = default;

  /// Sorts arbitrary (id, score) pairs into canonical order and keeps the first `k`.
  /// Throws std::invalid_argument on a non-finite score or a repeated id.
  static RankedList from_scores(std::vector<RankedEntry> scored, std::size_t k);

  /// Wraps entries that must already be in canonical order (checked).
  static RankedList from_sorted(std::vector<RankedEntry> entries);

  const std::vector<RankedEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const RankedEntry& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  std::vector<std::string> ids() const;
  std::vector<std::string> top_ids(std::size_t k) const;
  /// 1-based rank, or nullopt when absent.
  std::optional<std::size_t> rank_of(std::string_view id) const;

  bool operator==(const RankedList&) const = default;

 private:
  std::vector<RankedEntry> entries_;
};

/// Canonical ordering predicate: higher score first, then ascending id.
inline bool ranks_before(const RankedEntry& a, const RankedEntry& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.item_id < b.item_id;
}

/// True iff `entries` satisfies every RankedList invariant.
bool is_canonical(const std::vector<RankedEntry>& entries);

}  // namespace ctrag
