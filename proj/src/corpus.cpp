#include "ctrag/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <unordered_set>

#include <json.hpp>

namespace ctrag {

namespace {
constexpr std::array<std::string_view, kNumApps> kAppNames = {
    "mail", "calendar", "google", "music", "reminders", "notes", "phonecall"};
}  // namespace

std::string_view app_name(AppId app) { return kAppNames[app_index(app)]; }

std::optional<AppId> parse_app(std::string_view name) {
  for (AppId app : kAllApps) {
    if (app_name(app) == name) return app;
  }
  return std::nullopt;
}

std::string_view split_name(Split split) { return split == Split::kTrain ? "train" : "test"; }

std::optional<Split> parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  return std::nullopt;
}

double Persona::usage_weight(AppId app) const {
  auto it = app_usage_profile.find(app);
  return it == app_usage_profile.end() ? 0.0 : it->second;
}

std::string canonical_plan_string(const Plan& plan) {
  nlohmann::json j;
  j["api"] = plan.api;
  j["args"] = nlohmann::json::object();
  for (const auto& [k, v] : plan.args) j["args"][k] = v;
  return j.dump();
}

CorpusView::CorpusView(const Corpus& corpus) : corpus_(&corpus) {
  for (std::size_t i = 0; i < corpus.personas.size(); ++i) {
    persona_index_.emplace(corpus.personas[i].id, i);
  }
  for (std::size_t s = 0; s < corpus.stores.size(); ++s) {
    const auto& store = corpus.stores[s];
    stores_by_persona_[store.persona_id].push_back(s);
    for (const auto& item : store.items) items_.emplace(item.id, &item);
  }
  for (const auto& tool : corpus.toolbox) tools_.emplace(tool.name, &tool);
}

const Persona* CorpusView::persona(std::string_view id) const {
  auto it = persona_index_.find(std::string(id));
  return it == persona_index_.end() ? nullptr : &corpus_->personas[it->second];
}

std::vector<const ContextStore*> CorpusView::stores_of(std::string_view persona_id) const {
  std::vector<const ContextStore*> out;
  auto it = stores_by_persona_.find(std::string(persona_id));
  if (it == stores_by_persona_.end()) return out;
  for (std::size_t s : it->second) out.push_back(&corpus_->stores[s]);
  return out;
}

const ContextItem* CorpusView::item(std::string_view item_id) const {
  auto it = items_.find(std::string(item_id));
  return it == items_.end() ? nullptr : it->second;
}

const Tool* CorpusView::tool(std::string_view name) const {
  auto it = tools_.find(std::string(name));
  return it == tools_.end() ? nullptr : it->second;
}

std::vector<const LabeledQuery*> CorpusView::queries(Split split) const {
  std::vector<const LabeledQuery*> out;
  for (const auto& q : corpus_->queries) {
    if (q.split == split) out.push_back(&q);
  }
  return out;
}

std::vector<Violation> validate_corpus(const Corpus& corpus) {
  std::vector<Violation> out;
  auto add = [&out](std::string id, std::string what) {
    out.push_back({std::move(id), std::move(what)});
  };

  std::unordered_set<std::string> persona_ids;
  for (const auto& p : corpus.personas) {
    if (!persona_ids.insert(p.id).second) add(p.id, "persona id not unique");
    double sum = 0.0;
    for (const auto& [app, w] : p.app_usage_profile) {
      if (!(w >= 0.0) || !std::isfinite(w)) add(p.id, "app usage weight negative or non-finite");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) add(p.id, "app usage weights do not sum to 1");
  }

  // item ids by persona, for gold resolution and per-persona uniqueness
  std::unordered_map<std::string, std::unordered_set<std::string>> items_by_persona;
  std::unordered_map<std::string, std::pair<Timestamp, Timestamp>> span;
  for (const auto& store : corpus.stores) {
    if (!persona_ids.count(store.persona_id)) {
      add(store.persona_id, "store references unknown persona");
    }
    std::unordered_set<std::string> store_ids;
    auto& persona_items = items_by_persona[store.persona_id];
    for (const auto& item : store.items) {
      if (item.app != store.app) {
        add(item.id, "item app '" + std::string(app_name(item.app)) + "' differs from store app '" +
                         std::string(app_name(store.app)) + "'");
      }
      if (!store_ids.insert(item.id).second) add(item.id, "item id duplicated within store");
      else if (!persona_items.insert(item.id).second) add(item.id, "item id duplicated within persona");
      if (item.access_count < 0) add(item.id, "access_count negative");
      auto [it, fresh] = span.try_emplace(store.persona_id, item.timestamp, item.timestamp);
      if (!fresh) {
        it->second.first = std::min(it->second.first, item.timestamp);
        it->second.second = std::max(it->second.second, item.timestamp);
      }
    }
  }
  // every item must sit inside a 15-day window ending at the persona's latest item
  constexpr auto kWindow = std::chrono::days{15};
  for (const auto& store : corpus.stores) {
    auto it = span.find(store.persona_id);
    if (it == span.end()) continue;
    for (const auto& item : store.items) {
      if (item.timestamp < it->second.second - kWindow) {
        add(item.id, "timestamp outside the 15-day context window");
      }
    }
  }

  std::set<std::pair<AppId, std::string>> tool_keys;
  std::unordered_set<std::string> tool_names;
  for (const auto& tool : corpus.toolbox) {
    if (!tool_keys.emplace(tool.app, tool.name).second) add(tool.name, "(app, name) not unique in toolbox");
    tool_names.insert(tool.name);
    bool seen_optional = false;
    for (const auto& param : tool.params) {
      if (!param.required) seen_optional = true;
      else if (seen_optional) add(tool.name, "required param '" + param.name + "' after optional one");
    }
  }

  std::unordered_set<std::string> query_ids;
  for (const auto& q : corpus.queries) {
    if (!query_ids.insert(q.id).second) add(q.id, "query id not unique");
    if (!persona_ids.count(q.persona_id)) add(q.id, "query references unknown persona");
    if (q.gold_context_ids.empty()) add(q.id, "gold_context_ids empty");
    const auto pit = items_by_persona.find(q.persona_id);
    for (const auto& gid : q.gold_context_ids) {
      if (pit == items_by_persona.end() || !pit->second.count(gid)) {
        add(q.id, "gold context id '" + gid + "' does not resolve to an item of the persona");
      }
    }
    if (q.gold_tools.empty() || q.gold_tools.size() > 3) add(q.id, "gold_tools must have 1-3 entries");
    for (const auto& t : q.gold_tools) {
      if (!tool_names.count(t)) add(q.id, "gold tool '" + t + "' not in toolbox");
    }
    if (std::find(q.gold_tools.begin(), q.gold_tools.end(), q.gold_plan.api) == q.gold_tools.end()) {
      add(q.id, "gold_plan.api not in gold_tools");
    }
  }
  return out;
}

}  // namespace ctrag
