#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ctrag/ranked_list.hpp"

namespace ctrag {

using Analyzer = std::function<std::vector<std::string>(std::string_view)>;

struct IndexedDoc {
  std::string id;
  std::string text;
};

/// Immutable term -> postings index with the statistics BM25 and TF-IDF need.
class InvertedIndex {
 public:
  struct Posting {
    std::size_t doc;
    int tf;
  };

  InvertedIndex() : InvertedIndex(std::vector<IndexedDoc>{}) {}
  /// Throws IndexError on a repeated document id. `analyzer` defaults to `tokenize`.
  explicit InvertedIndex(const std::vector<IndexedDoc>& docs, Analyzer analyzer = {});

  std::size_t size() const { return ids_.size(); }
  const std::string& doc_id(std::size_t doc) const { return ids_[doc]; }
  std::size_t doc_length(std::size_t doc) const { return lengths_[doc]; }
  double average_doc_length() const { return avg_length_; }

  std::size_t document_frequency(std::string_view term) const;
  int term_frequency(std::string_view term, std::size_t doc) const;
  const std::vector<Posting>* postings(std::string_view term) const;

  /// ln(1 + (N - df + 0.5) / (df + 0.5)); always positive.
  double idf(std::string_view term) const;

  /// Runs the analyzer the index was built with.
  std::vector<std::string> analyze(std::string_view text) const { return analyzer_(text); }

 private:
  Analyzer analyzer_;
  std::vector<std::string> ids_;
  std::vector<std::size_t> lengths_;
  double avg_length_ = 0.0;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
};

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
  std::unordered_map<std::string, double> per_term_k1;  // BM25T saturation overrides

  double k1_for(const std::string& term) const {
    auto it = per_term_k1.find(term);
    return it == per_term_k1.end() ? k1 : it->second;
  }
};

/// Dense per-document BM25 scores (index order). Query terms are de-duplicated;
/// unknown terms contribute nothing.
std::vector<double> bm25_scores(const InvertedIndex& index, const std::vector<std::string>& query_terms,
                                const Bm25Params& params = {});

/// Top-k documents by BM25, zero-score documents omitted. Throws std::invalid_argument if k == 0
/// or the parameters are out of range.
RankedList bm25_topk(const InvertedIndex& index, const std::vector<std::string>& query_terms,
                     const Bm25Params& params, std::size_t k);

}  // namespace ctrag
