#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctrag/context_index.hpp"
#include "ctrag/corpus.hpp"
#include "ctrag/index.hpp"
#include "ctrag/ltr.hpp"
#include "ctrag/ranked_list.hpp"

namespace ctrag {

enum class FusionMode { kFuseStores, kFuseRankers };
enum class Backend { kBm25, kSemantic, kLtr, kOracle };

std::string_view fusion_mode_name(FusionMode mode);
std::optional<FusionMode> parse_fusion_mode(std::string_view name);
std::string_view backend_name(Backend backend);
std::optional<Backend> parse_backend(std::string_view name);

struct FusionConfig {
  double rrf_k = 60.0;
  FusionMode mode = FusionMode::kFuseStores;
  Backend backend = Backend::kLtr;
};

/// score(d) = sum over lists containing d of 1 / (rrf_k + rank). Throws
/// std::invalid_argument if rrf_k <= 0 or k == 0.
RankedList rrf_fuse(const std::vector<RankedList>& lists, double rrf_k, std::size_t k);

struct RetrievalArtifacts {
  const ContextIndex* index = nullptr;
  const LtrModel* ltr_model = nullptr;
  Bm25Params bm25;
};

/// Federated retrieval over the query persona's stores. `stores` must all belong to the
/// query's persona. Throws ConfigError when the backend's artifacts are missing.
RankedList federated_retrieve(const LabeledQuery& query, const std::vector<const ContextStore*>& stores,
                              const FusionConfig& config, const RetrievalArtifacts& artifacts, std::size_t k);

/// Produces text appended to a query before retrieval.
class QueryAugmenter {
 public:
  virtual ~QueryAugmenter() = default;
  virtual std::string suffix(std::string_view query_text) const = 0;
};

class IdentityAugmenter final : public QueryAugmenter {
 public:
  std::string suffix(std::string_view) const override { return {}; }
};

/// Appends " [hint: a b]" naming the persona's two most used apps.
class HabitHintAugmenter final : public QueryAugmenter {
 public:
  explicit HabitHintAugmenter(const Persona& persona);
  std::string suffix(std::string_view query_text) const override;

 private:
  std::string hint_;
};

std::string augment_query(std::string_view query_text, const QueryAugmenter& augmenter);

}  // namespace ctrag
