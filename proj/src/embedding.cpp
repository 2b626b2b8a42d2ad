#include "ctrag/embedding.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "ctrag/errors.hpp"
#include "ctrag/text.hpp"

namespace ctrag {

void normalize(Embedding& e) {
  double norm2 = 0.0;
  for (float v : e.values) norm2 += static_cast<double>(v) * v;
  if (norm2 == 0.0) {
    e.zero = true;
    return;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (float& v : e.values) v = static_cast<float>(v * inv);
  e.zero = false;
}

double dot(const Embedding& a, const Embedding& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += static_cast<double>(a.values[i]) * b.values[i];
  return s;
}

Embedding embed_hashed_tfidf(std::string_view text, std::size_t dims, const InvertedIndex& idf_source) {
  if (dims < 16 || (dims & (dims - 1)) != 0) {
    throw std::invalid_argument("embedding dims must be a power of two >= 16");
  }
  std::unordered_map<std::string, int> tf;
  for (auto& term : idf_source.analyze(text)) ++tf[term];
  std::vector<double> acc(dims, 0.0);
  for (const auto& [term, count] : tf) {
    if (idf_source.document_frequency(term) == 0) continue;
    const std::uint64_t h = hash64(term, kEmbeddingHashSeed);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    acc[h & (dims - 1)] += sign * count * idf_source.idf(term);
  }
  Embedding e;
  e.values.assign(acc.begin(), acc.end());
  // accumulate in double, then normalize from the exact sums
  double norm2 = 0.0;
  for (double v : acc) norm2 += v * v;
  if (norm2 == 0.0) {
    e.zero = true;
    return e;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (std::size_t i = 0; i < dims; ++i) e.values[i] = static_cast<float>(acc[i] * inv);
  return e;
}

HashedTfidfEmbedder::HashedTfidfEmbedder(std::shared_ptr<const InvertedIndex> idf_source, std::size_t dims)
    : idf_source_(std::move(idf_source)), dims_(dims) {
  if (!idf_source_) throw std::invalid_argument("HashedTfidfEmbedder needs an idf source");
  if (dims < 16 || (dims & (dims - 1)) != 0) {
    throw std::invalid_argument("embedding dims must be a power of two >= 16");
  }
}

Embedding HashedTfidfEmbedder::embed(std::string_view, std::string_view text) const {
  return embed_hashed_tfidf(text, dims_, *idf_source_);
}

PrecomputedEmbedder::PrecomputedEmbedder(EmbeddingMap vectors) : vectors_(std::move(vectors)) {
  for (const auto& [id, e] : vectors_) {
    if (dims_ == 0) dims_ = e.dims();
    else if (e.dims() != dims_) throw std::invalid_argument("precomputed embeddings have ragged dims at " + id);
  }
}

Embedding PrecomputedEmbedder::embed(std::string_view key, std::string_view) const {
  auto it = vectors_.find(std::string(key));
  if (it == vectors_.end()) throw ConfigError("no precomputed embedding for '" + std::string(key) + "'");
  return it->second;
}

EmbeddingMap load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::string file = path.filename().string();
  EmbeddingMap out;
  std::size_t dims = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw ParseError(file, line_no, "id", "expected 'id<TAB>values'");
    std::string id = line.substr(0, tab);
    Embedding e;
    const char* p = line.c_str() + tab + 1;
    const char* end = line.c_str() + line.size();
    while (p < end) {
      char* next = nullptr;
      errno = 0;
      const double v = std::strtod(p, &next);
      if (next == p || errno == ERANGE || !std::isfinite(v)) {
        throw ParseError(file, line_no, "values", "bad number at column " + std::to_string(p - line.c_str() + 1));
      }
      e.values.push_back(static_cast<float>(v));
      p = next;
      if (p < end) {
        if (*p != ',') throw ParseError(file, line_no, "values", "expected ','");
        ++p;
        if (p == end) throw ParseError(file, line_no, "values", "trailing ','");
      }
    }
    if (e.values.empty()) throw ParseError(file, line_no, "values", "empty vector");
    if (dims == 0) dims = e.values.size();
    if (e.values.size() != dims) {
      throw ParseError(file, line_no, "values",
                       "expected " + std::to_string(dims) + " values, got " + std::to_string(e.values.size()));
    }
    normalize(e);
    if (!out.emplace(id, std::move(e)).second) throw ParseError(file, line_no, "id", "duplicate id '" + id + "'");
  }
  return out;
}

RankedList cosine_topk(const Embedding& query, const std::vector<EmbeddingCandidate>& candidates,
                       std::size_t k) {
  if (k == 0) throw std::invalid_argument("cosine_topk: k must be >= 1");
  std::vector<RankedEntry> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (c.embedding->dims() != query.dims()) {
      throw std::invalid_argument("cosine_topk: dims mismatch for " + std::string(c.id));
    }
    scored.push_back({std::string(c.id), dot(query, *c.embedding)});
  }
  return RankedList::from_scores(std::move(scored), k);
}

RankedList cosine_topk(const Embedding& query, const EmbeddingMap& candidates, std::size_t k) {
  std::vector<EmbeddingCandidate> view;
  view.reserve(candidates.size());
  for (const auto& [id, e] : candidates) view.push_back({id, &e});
  return cosine_topk(query, view, k);
}

}  // namespace ctrag
