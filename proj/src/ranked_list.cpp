#include "ctrag/ranked_list.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace ctrag {

RankedList RankedList::from_scores(std::vector<RankedEntry> scored, std::size_t k) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(scored.size());
  for (const auto& e : scored) {
    if (!std::isfinite(e.score)) throw std::invalid_argument("non-finite score for " + e.item_id);
    if (!seen.insert(e.item_id).second) throw std::invalid_argument("duplicate id " + e.item_id);
  }
  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                    ranks_before);
  scored.resize(keep);
  RankedList out;
  out.entries_ = std::move(scored);
  return out;
}

RankedList RankedList::from_sorted(std::vector<RankedEntry> entries) {
  if (!is_canonical(entries)) throw std::invalid_argument("entries violate ranked-list order");
  RankedList out;
  out.entries_ = std::move(entries);
  return out;
}

std::vector<std::string> RankedList::ids() const { return top_ids(entries_.size()); }

std::vector<std::string> RankedList::top_ids(std::size_t k) const {
  std::vector<std::string> out;
  const std::size_t n = std::min(k, entries_.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(entries_[i].item_id);
  return out;
}

std::optional<std::size_t> RankedList::rank_of(std::string_view id) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].item_id == id) return i + 1;
  }
  return std::nullopt;
}

bool is_canonical(const std::vector<RankedEntry>& entries) {
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!std::isfinite(entries[i].score)) return false;
    if (!seen.insert(entries[i].item_id).second) return false;
    if (i > 0 && !ranks_before(entries[i - 1], entries[i])) return false;
  }
  return true;
}

}  // namespace ctrag
