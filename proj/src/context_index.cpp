#include "ctrag/context_index.hpp"

#include "ctrag/errors.hpp"
#include "ctrag/text.hpp"

namespace ctrag {

std::string item_text(const ContextItem& item) { return item.title + ". " + item.body; }

std::size_t PersonaIndex::position_of(std::string_view item_id) const {
  auto it = position.find(std::string(item_id));
  if (it == position.end()) throw std::invalid_argument("item " + std::string(item_id) + " not in persona index");
  return it->second;
}

ContextIndex::ContextIndex(const Corpus& corpus, std::shared_ptr<const Embedder> embedder)
    : corpus_(&corpus), embedder_(std::move(embedder)) {
  if (!embedder_) throw ConfigError("context index needs an embedder");
  CorpusView view(corpus);
  personas_.resize(corpus.personas.size());
  for (std::size_t p = 0; p < corpus.personas.size(); ++p) {
    const Persona& persona = corpus.personas[p];
    PersonaIndex& pi = personas_[p];
    pi.persona = &persona;
    pi.stores = view.stores_of(persona.id);
    std::vector<IndexedDoc> pooled_docs;
    for (std::size_t s = 0; s < pi.stores.size(); ++s) {
      std::vector<IndexedDoc> store_docs;
      for (const auto& item : pi.stores[s]->items) {
        pi.position.emplace(item.id, pi.items.size());
        pi.items.push_back(&item);
        pi.store_of_item.push_back(s);
        store_docs.push_back({item.id, item_text(item)});
        pooled_docs.push_back(store_docs.back());
      }
      pi.store_indexes.emplace_back(store_docs, content_terms);
    }
    pi.pooled = InvertedIndex(pooled_docs, content_terms);
    pi.item_embeddings.reserve(pi.items.size());
    for (const auto* item : pi.items) pi.item_embeddings.push_back(embedder_->embed(item->id, item_text(*item)));
    by_id_.emplace(persona.id, p);
  }
}

const PersonaIndex& ContextIndex::persona(std::string_view persona_id) const {
  auto it = by_id_.find(std::string(persona_id));
  if (it == by_id_.end()) throw ConfigError("unknown persona " + std::string(persona_id));
  return personas_[it->second];
}

std::shared_ptr<HashedTfidfEmbedder> make_context_embedder(const Corpus& corpus, std::size_t dims, int ngram) {
  std::vector<IndexedDoc> docs;
  for (const auto& store : corpus.stores) {
    for (const auto& item : store.items) docs.push_back({store.persona_id + "/" + item.id, item_text(item)});
  }
  Analyzer analyzer = [ngram](std::string_view text) { return tokenize_with_subwords(text, ngram); };
  auto idf = std::make_shared<const InvertedIndex>(docs, analyzer);
  return std::make_shared<HashedTfidfEmbedder>(std::move(idf), dims);
}

}  // namespace ctrag
