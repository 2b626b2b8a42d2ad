#include "ctrag/index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "ctrag/errors.hpp"
#include "ctrag/text.hpp"

namespace ctrag {

InvertedIndex::InvertedIndex(const std::vector<IndexedDoc>& docs, Analyzer analyzer)
    : analyzer_(analyzer ? std::move(analyzer) : Analyzer([](std::string_view t) { return tokenize(t); })) {
  std::unordered_set<std::string> seen;
  ids_.reserve(docs.size());
  lengths_.reserve(docs.size());
  std::size_t total = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (!seen.insert(docs[d].id).second) throw IndexError("duplicate document id '" + docs[d].id + "'");
    const auto terms = analyzer_(docs[d].text);
    ids_.push_back(docs[d].id);
    lengths_.push_back(terms.size());
    total += terms.size();
    std::unordered_map<std::string, int> counts;
    for (const auto& t : terms) ++counts[t];
    // deterministic posting order regardless of hash iteration
    std::vector<std::pair<std::string, int>> sorted(counts.begin(), counts.end());
    std::sort(sorted.begin(), sorted.end());
    for (auto& [term, tf] : sorted) postings_[term].push_back({d, tf});
  }
  avg_length_ = docs.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(docs.size());
}

const std::vector<InvertedIndex::Posting>* InvertedIndex::postings(std::string_view term) const {
  auto it = postings_.find(std::string(term));
  return it == postings_.end() ? nullptr : &it->second;
}

std::size_t InvertedIndex::document_frequency(std::string_view term) const {
  const auto* p = postings(term);
  return p ? p->size() : 0;
}

int InvertedIndex::term_frequency(std::string_view term, std::size_t doc) const {
  const auto* p = postings(term);
  if (!p) return 0;
  auto it = std::lower_bound(p->begin(), p->end(), doc,
                             [](const Posting& posting, std::size_t d) { return posting.doc < d; });
  return (it != p->end() && it->doc == doc) ? it->tf : 0;
}

double InvertedIndex::idf(std::string_view term) const {
  const double n = static_cast<double>(size());
  const double df = static_cast<double>(document_frequency(term));
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

std::vector<double> bm25_scores(const InvertedIndex& index, const std::vector<std::string>& query_terms,
                                const Bm25Params& params) {
  std::vector<double> scores(index.size(), 0.0);
  if (index.size() == 0) return scores;
  std::vector<std::string> unique = query_terms;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  const double avg = index.average_doc_length();
  for (const auto& term : unique) {
    const auto* postings = index.postings(term);
    if (!postings) continue;
    const double idf = index.idf(term);
    const double k1 = params.k1_for(term);
    for (const auto& p : *postings) {
      const double len_norm = avg > 0.0 ? static_cast<double>(index.doc_length(p.doc)) / avg : 0.0;
      const double tf = p.tf;
      scores[p.doc] += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - params.b + params.b * len_norm));
    }
  }
  return scores;
}

RankedList bm25_topk(const InvertedIndex& index, const std::vector<std::string>& query_terms,
                     const Bm25Params& params, std::size_t k) {
  if (k == 0) throw std::invalid_argument("bm25_topk: k must be >= 1");
  if (!(params.k1 > 0.0) || params.b < 0.0 || params.b > 1.0) {
    throw std::invalid_argument("bm25_topk: require k1 > 0 and b in [0, 1]");
  }
  for (const auto& [term, k1] : params.per_term_k1) {
    if (!(k1 > 0.0)) throw std::invalid_argument("bm25_topk: per-term k1 must be positive for '" + term + "'");
  }
  const auto scores = bm25_scores(index, query_terms, params);
  std::vector<RankedEntry> scored;
  for (std::size_t d = 0; d < scores.size(); ++d) {
    if (scores[d] > 0.0) scored.push_back({index.doc_id(d), scores[d]});
  }
  return RankedList::from_scores(std::move(scored), k);
}

}  // namespace ctrag
