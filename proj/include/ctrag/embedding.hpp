#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctrag/index.hpp"
#include "ctrag/ranked_list.hpp"

namespace ctrag {

struct Embedding {
  std::vector<float> values;
  bool zero = false;  // no signal; the vector is all zeros and was not normalized

  std::size_t dims() const { return values.size(); }
};

/// Scales to unit L2 norm in place; an all-zero vector is flagged instead.
void normalize(Embedding& e);
double dot(const Embedding& a, const Embedding& b);

inline constexpr std::uint64_t kEmbeddingHashSeed = 0x5eed0c0ffee1234ULL;

/// Feature-hashed TF-IDF: each analyzed term goes to bucket `h & (dims-1)` with sign
/// from the top hash bit, weighted by tf * idf from `idf_source`. Terms unknown to
/// `idf_source` are dropped. Throws std::invalid_argument unless dims >= 16 and a power of two.
Embedding embed_hashed_tfidf(std::string_view text, std::size_t dims, const InvertedIndex& idf_source);

/// Anything that turns (key, text) into a unit vector. Hashed embedders use the text;
/// precomputed ones look up the key.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual Embedding embed(std::string_view key, std::string_view text) const = 0;
  virtual std::size_t dims() const = 0;
};

class HashedTfidfEmbedder final : public Embedder {
 public:
  HashedTfidfEmbedder(std::shared_ptr<const InvertedIndex> idf_source, std::size_t dims);

  Embedding embed(std::string_view key, std::string_view text) const override;
  std::size_t dims() const override { return dims_; }
  const InvertedIndex& idf_source() const { return *idf_source_; }

 private:
  std::shared_ptr<const InvertedIndex> idf_source_;
  std::size_t dims_;
};

using EmbeddingMap = std::unordered_map<std::string, Embedding>;

/// Externally produced vectors (e.g. a fine-tuned encoder), keyed by item or query id.
class PrecomputedEmbedder final : public Embedder {
 public:
  explicit PrecomputedEmbedder(EmbeddingMap vectors);

  /// Throws ConfigError when `key` has no vector.
  Embedding embed(std::string_view key, std::string_view text) const override;
  std::size_t dims() const override { return dims_; }

 private:
  EmbeddingMap vectors_;
  std::size_t dims_ = 0;
};

/// Reads `id<TAB>v1,v2,...,vD` lines, L2-normalizing each. Ragged dims, bad numbers,
/// or repeated ids raise ParseError naming the line.
EmbeddingMap load_embeddings(const std::filesystem::path& path);

struct EmbeddingCandidate {
  std::string_view id;
  const Embedding* embedding;
};

/// Exact top-k by dot product over pre-normalized vectors. Throws std::invalid_argument on
/// mismatched dims or k == 0.
RankedList cosine_topk(const Embedding& query, const std::vector<EmbeddingCandidate>& candidates,
                       std::size_t k);
RankedList cosine_topk(const Embedding& query, const EmbeddingMap& candidates, std::size_t k);

}  // namespace ctrag
