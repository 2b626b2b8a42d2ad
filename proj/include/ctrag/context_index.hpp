#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctrag/corpus.hpp"
#include "ctrag/embedding.hpp"
#include "ctrag/index.hpp"

namespace ctrag {

/// "title. body", the text every retrieval backend sees for an item.
std::string item_text(const ContextItem& item);

/// Per-persona search structures: one BM25 index over the pooled items, one per store,
/// and item embeddings aligned with the pooled order.
struct PersonaIndex {
  const Persona* persona = nullptr;
  std::vector<const ContextItem*> items;
  std::vector<const ContextStore*> stores;
  std::vector<std::size_t> store_of_item;  // index into `stores`, aligned with `items`
  InvertedIndex pooled;
  std::vector<InvertedIndex> store_indexes;  // aligned with `stores`
  std::vector<Embedding> item_embeddings;    // aligned with `items`
  std::unordered_map<std::string, std::size_t> position;

  std::size_t position_of(std::string_view item_id) const;
};

/// Builds every persona's structures once. The corpus must outlive the index.
class ContextIndex {
 public:
  ContextIndex(const Corpus& corpus, std::shared_ptr<const Embedder> embedder);

  /// Throws ConfigError for an unknown persona.
  const PersonaIndex& persona(std::string_view persona_id) const;
  const Embedder& embedder() const { return *embedder_; }
  const Corpus& corpus() const { return *corpus_; }

 private:
  const Corpus* corpus_;
  std::shared_ptr<const Embedder> embedder_;
  std::vector<PersonaIndex> personas_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

inline constexpr std::size_t kDefaultEmbeddingDims = 512;
inline constexpr int kDefaultSubwordNgram = 3;

/// Hashed TF-IDF embedder whose idf comes from every context item in the corpus,
/// analyzed into words plus character trigrams.
std::shared_ptr<HashedTfidfEmbedder> make_context_embedder(const Corpus& corpus,
                                                           std::size_t dims = kDefaultEmbeddingDims,
                                                           int ngram = kDefaultSubwordNgram);

}  // namespace ctrag
