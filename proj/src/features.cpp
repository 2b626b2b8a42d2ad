#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "ctrag/ltr.hpp"
#include "ctrag/text.hpp"
#include "ctrag/time.hpp"

namespace ctrag {

const std::vector<std::string>& feature_schema() {
  static const std::vector<std::string> schema = [] {
    std::vector<std::string> s = {"bm25_score",   "cosine_sim",        "access_count_log",
                                  "recency_days", "hour_of_day_match", "app_usage_weight"};
    for (AppId app : kAllApps) s.push_back("app_is_" + std::string(app_name(app)));
    return s;
  }();
  return schema;
}

std::string schema_hash(const std::vector<std::string>& schema) {
  std::string joined = "v1";
  for (const auto& name : schema) joined += "|" + name;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash64(joined, 0)));
  return buf;
}

namespace {

FeatureVector non_text_features(const LabeledQuery& query, const ContextItem& item, const Persona& persona) {
  FeatureVector f{};
  f[kAccessCountLog] = std::log1p(static_cast<double>(std::max<std::int64_t>(item.access_count, 0)));
  const double seconds = static_cast<double>((query.timestamp - item.timestamp).count());
  f[kRecencyDays] = std::max(0.0, seconds / 86400.0);
  f[kHourOfDayMatch] = std::abs(hour_of_day(query.timestamp) - hour_of_day(item.timestamp)) <= 2 ? 1.0 : 0.0;
  f[kAppUsageWeight] = persona.usage_weight(item.app);
  f[kAppOneHot + app_index(item.app)] = 1.0;
  return f;
}

double cosine(const Embedding& a, const Embedding& b) {
  if (a.zero || b.zero) return 0.0;
  return dot(a, b);
}

}  // namespace

FeatureVector extract_features(const LabeledQuery& query, const ContextItem& item, const Persona& persona,
                               const PersonaIndex& index, const Embedder& embedder) {
  if (query.persona_id != persona.id || index.persona == nullptr || index.persona->id != persona.id) {
    throw std::invalid_argument("extract_features: persona mismatch");
  }
  const std::size_t pos = index.position_of(item.id);
  FeatureVector f = non_text_features(query, item, persona);
  f[kBm25Score] = bm25_scores(index.pooled, index.pooled.analyze(query.text))[pos];
  f[kCosineSim] = cosine(embedder.embed(query.id, query.text), embedder.embed(item.id, item_text(item)));
  return f;
}

std::vector<FeatureVector> extract_group_features(const LabeledQuery& query, const PersonaIndex& index,
                                                  const Embedder& embedder) {
  if (index.persona == nullptr || query.persona_id != index.persona->id) {
    throw std::invalid_argument("extract_group_features: persona mismatch");
  }
  const auto bm25 = bm25_scores(index.pooled, index.pooled.analyze(query.text));
  const Embedding q = embedder.embed(query.id, query.text);
  std::vector<FeatureVector> out;
  out.reserve(index.items.size());
  for (std::size_t i = 0; i < index.items.size(); ++i) {
    FeatureVector f = non_text_features(query, *index.items[i], *index.persona);
    f[kBm25Score] = bm25[i];
    f[kCosineSim] = cosine(q, index.item_embeddings[i]);
    out.push_back(f);
  }
  return out;
}

QueryGroup build_query_group(const LabeledQuery& query, const ContextIndex& index) {
  const PersonaIndex& pi = index.persona(query.persona_id);
  auto features = extract_group_features(query, pi, index.embedder());
  QueryGroup group;
  group.query_id = query.id;
  group.rows.reserve(pi.items.size());
  for (std::size_t i = 0; i < pi.items.size(); ++i) {
    int rel = 0;
    for (const auto& g : query.gold_context_ids) rel |= (g == pi.items[i]->id);
    group.rows.push_back({pi.items[i]->id, features[i], rel});
  }
  return group;
}

}  // namespace ctrag
