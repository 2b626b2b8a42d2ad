#include "ctrag/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "ctrag/errors.hpp"
#include "ctrag/text.hpp"

namespace ctrag {

std::string_view fusion_mode_name(FusionMode mode) {
  return mode == FusionMode::kFuseStores ? "fuse-stores" : "fuse-rankers";
}

std::optional<FusionMode> parse_fusion_mode(std::string_view name) {
  if (name == "fuse-stores") return FusionMode::kFuseStores;
  if (name == "fuse-rankers") return FusionMode::kFuseRankers;
  return std::nullopt;
}

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::kBm25: return "bm25";
    case Backend::kSemantic: return "semantic";
    case Backend::kLtr: return "ltr";
    case Backend::kOracle: return "oracle";
  }
  return "?";
}

std::optional<Backend> parse_backend(std::string_view name) {
  for (Backend b : {Backend::kBm25, Backend::kSemantic, Backend::kLtr, Backend::kOracle}) {
    if (backend_name(b) == name) return b;
  }
  return std::nullopt;
}

RankedList rrf_fuse(const std::vector<RankedList>& lists, double rrf_k, std::size_t k) {
  if (!(rrf_k > 0.0) || !std::isfinite(rrf_k)) throw std::invalid_argument("rrf_fuse: rrf_k must be > 0");
  if (k == 0) throw std::invalid_argument("rrf_fuse: k must be >= 1");
  // Summing in a fixed id order keeps the floating-point result independent of list order.
  std::map<std::string, std::vector<std::size_t>> ranks;
  for (const auto& list : lists) {
    for (std::size_t r = 0; r < list.size(); ++r) ranks[list[r].item_id].push_back(r + 1);
  }
  std::vector<RankedEntry> fused;
  fused.reserve(ranks.size());
  for (auto& [id, rs] : ranks) {
    std::sort(rs.begin(), rs.end());
    double score = 0.0;
    for (std::size_t r : rs) score += 1.0 / (rrf_k + static_cast<double>(r));
    fused.push_back({id, score});
  }
  return RankedList::from_scores(std::move(fused), k);
}

namespace {

struct Candidates {
  std::vector<std::size_t> positions;  // into PersonaIndex::items
};

RankedList rank_bm25(const std::vector<std::string>& terms, const Bm25Params& params, const InvertedIndex& index) {
  const auto scores = bm25_scores(index, terms, params);
  std::vector<RankedEntry> scored;
  for (std::size_t doc = 0; doc < index.size(); ++doc) {
    if (scores[doc] > 0.0) scored.push_back({index.doc_id(doc), scores[doc]});
  }
  return RankedList::from_scores(std::move(scored), scored.size());
}

RankedList rank_semantic(const PersonaIndex& pi, const Embedding& q, const Candidates& c) {
  std::vector<EmbeddingCandidate> cands;
  cands.reserve(c.positions.size());
  for (std::size_t p : c.positions) cands.push_back({pi.items[p]->id, &pi.item_embeddings[p]});
  if (cands.empty()) return {};
  return cosine_topk(q, cands, cands.size());
}

RankedList rank_ltr(const PersonaIndex& pi, const std::vector<FeatureVector>& features, const Candidates& c,
                    const LtrModel& model) {
  std::vector<RankCandidate> cands;
  cands.reserve(c.positions.size());
  for (std::size_t p : c.positions) cands.push_back({pi.items[p]->id, features[p]});
  return rank(model, cands);
}

}  // namespace

RankedList federated_retrieve(const LabeledQuery& query, const std::vector<const ContextStore*>& stores,
                              const FusionConfig& config, const RetrievalArtifacts& artifacts, std::size_t k) {
  if (k == 0) throw std::invalid_argument("federated_retrieve: k must be >= 1");
  if (!(config.rrf_k > 0.0)) throw ConfigError("rrf_k must be > 0");
  for (const auto* s : stores) {
    if (s == nullptr || s->persona_id != query.persona_id) {
      throw std::invalid_argument("federated_retrieve: store does not belong to persona " + query.persona_id);
    }
  }
  if (config.backend == Backend::kOracle) {
    std::vector<RankedEntry> gold;
    const double n = static_cast<double>(query.gold_context_ids.size());
    for (std::size_t i = 0; i < query.gold_context_ids.size(); ++i) {
      gold.push_back({query.gold_context_ids[i], n - static_cast<double>(i)});
    }
    return RankedList::from_scores(std::move(gold), k);
  }
  if (artifacts.index == nullptr) throw ConfigError("backend " + std::string(backend_name(config.backend)) + " needs a context index");
  if (config.backend == Backend::kLtr && artifacts.ltr_model == nullptr) {
    throw ConfigError("backend ltr needs a trained model");
  }

  const PersonaIndex& pi = artifacts.index->persona(query.persona_id);
  const std::vector<std::string> terms = pi.pooled.analyze(query.text);
  Embedding q;
  if (config.backend != Backend::kBm25) q = artifacts.index->embedder().embed(query.id, query.text);
  std::vector<FeatureVector> features;
  if (config.backend == Backend::kLtr) features = extract_group_features(query, pi, artifacts.index->embedder());

  std::vector<std::size_t> store_slots;
  for (const auto* s : stores) {
    auto it = std::find(pi.stores.begin(), pi.stores.end(), s);
    if (it == pi.stores.end()) throw std::invalid_argument("federated_retrieve: store not indexed for persona");
    store_slots.push_back(static_cast<std::size_t>(it - pi.stores.begin()));
  }

  std::vector<RankedList> lists;
  if (config.mode == FusionMode::kFuseStores) {
    for (std::size_t slot : store_slots) {
      Candidates c;
      for (std::size_t p = 0; p < pi.items.size(); ++p) {
        if (pi.store_of_item[p] == slot) c.positions.push_back(p);
      }
      switch (config.backend) {
        case Backend::kBm25: lists.push_back(rank_bm25(terms, artifacts.bm25, pi.store_indexes[slot])); break;
        case Backend::kSemantic: lists.push_back(rank_semantic(pi, q, c)); break;
        case Backend::kLtr: lists.push_back(rank_ltr(pi, features, c, *artifacts.ltr_model)); break;
        case Backend::kOracle: break;
      }
    }
  } else {
    Candidates c;
    for (std::size_t p = 0; p < pi.items.size(); ++p) {
      if (std::find(store_slots.begin(), store_slots.end(), pi.store_of_item[p]) != store_slots.end()) {
        c.positions.push_back(p);
      }
    }
    // When the selected stores are the whole persona, the pooled index is exactly the pool.
    const bool whole = c.positions.size() == pi.items.size();
    InvertedIndex subset;
    if (!whole) {
      std::vector<IndexedDoc> docs;
      for (std::size_t p : c.positions) docs.push_back({pi.items[p]->id, item_text(*pi.items[p])});
      subset = InvertedIndex(docs, content_terms);
    }
    if (config.backend != Backend::kSemantic) lists.push_back(rank_bm25(terms, artifacts.bm25, whole ? pi.pooled : subset));
    if (config.backend != Backend::kBm25) lists.push_back(rank_semantic(pi, q, c));
    if (config.backend == Backend::kLtr) lists.push_back(rank_ltr(pi, features, c, *artifacts.ltr_model));
  }
  return rrf_fuse(lists, config.rrf_k, k);
}

HabitHintAugmenter::HabitHintAugmenter(const Persona& persona) {
  std::vector<AppId> apps(kAllApps.begin(), kAllApps.end());
  std::stable_sort(apps.begin(), apps.end(),
                   [&](AppId a, AppId b) { return persona.usage_weight(a) > persona.usage_weight(b); });
  hint_ = " [hint: " + std::string(app_name(apps[0])) + " " + std::string(app_name(apps[1])) + "]";
}

std::string HabitHintAugmenter::suffix(std::string_view) const { return hint_; }

std::string augment_query(std::string_view query_text, const QueryAugmenter& augmenter) {
  return std::string(query_text) + augmenter.suffix(query_text);
}

}  // namespace ctrag
