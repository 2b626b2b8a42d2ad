#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "ctrag/corpus.hpp"
#include "ctrag/errors.hpp"

namespace ctrag {

using nlohmann::json;

namespace {

json to_json(const Persona& p) {
  json profile = json::object();
  for (const auto& [app, w] : p.app_usage_profile) profile[std::string(app_name(app))] = w;
  return {{"id", p.id}, {"attributes", p.attributes}, {"app_usage_profile", profile}};
}

json to_json(const ContextItem& item, const std::string& persona_id) {
  return {{"persona_id", persona_id},
          {"id", item.id},
          {"app", app_name(item.app)},
          {"title", item.title},
          {"body", item.body},
          {"timestamp", format_rfc3339(item.timestamp)},
          {"categorical_tags", item.categorical_tags},
          {"access_count", item.access_count}};
}

json to_json(const Tool& tool) {
  json params = json::array();
  // required params first in serialized form
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& p : tool.params) {
      if (p.required == (pass == 0)) {
        params.push_back({{"name", p.name}, {"description", p.description}, {"required", p.required}});
      }
    }
  }
  return {{"name", tool.name}, {"app", app_name(tool.app)}, {"description", tool.description},
          {"params", params}};
}

json to_json(const Plan& plan) { return {{"api", plan.api}, {"args", plan.args}}; }

json to_json(const LabeledQuery& q) {
  return {{"id", q.id},
          {"persona_id", q.persona_id},
          {"text", q.text},
          {"timestamp", format_rfc3339(q.timestamp)},
          {"gold_context_ids", q.gold_context_ids},
          {"gold_tools", q.gold_tools},
          {"gold_plan", to_json(q.gold_plan)},
          {"split", split_name(q.split)}};
}

void write_lines(const std::filesystem::path& path, const std::vector<json>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto& r : records) out << r.dump() << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Field accessor bound to a record location so every failure names file, line and field.
class Record {
 public:
  Record(const json& j, const std::string& file, std::size_t line) : j_(j), file_(file), line_(line) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ParseError(file_, line_, field, what);
  }

  const json& at(const std::string& field) const {
    auto it = j_.find(field);
    if (it == j_.end()) fail(field, "missing");
    return *it;
  }

  std::string str(const std::string& field) const {
    const auto& v = at(field);
    if (!v.is_string()) fail(field, "expected string");
    return v.get<std::string>();
  }

  std::map<std::string, std::string> str_map(const std::string& field) const {
    const auto& v = at(field);
    if (!v.is_object()) fail(field, "expected object");
    std::map<std::string, std::string> out;
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (!it.value().is_string()) fail(field + "." + it.key(), "expected string");
      out.emplace(it.key(), it.value().get<std::string>());
    }
    return out;
  }

  std::vector<std::string> str_list(const std::string& field) const {
    const auto& v = at(field);
    if (!v.is_array()) fail(field, "expected array");
    std::vector<std::string> out;
    for (const auto& e : v) {
      if (!e.is_string()) fail(field, "expected array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  AppId app(const std::string& field) const {
    auto parsed = parse_app(str(field));
    if (!parsed) fail(field, "unknown app '" + str(field) + "'");
    return *parsed;
  }

  Timestamp time(const std::string& field) const {
    auto parsed = parse_rfc3339(str(field));
    if (!parsed) fail(field, "not an RFC 3339 timestamp");
    return *parsed;
  }

 private:
  const json& j_;
  const std::string& file_;
  std::size_t line_;
};

template <typename Fn>
void read_lines(const std::filesystem::path& path, Fn&& on_record) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::string file = path.filename().string();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(file, line_no, "<record>", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(file, line_no, "<record>", "expected JSON object");
    on_record(Record(j, file, line_no), line_no);
  }
}

}  // namespace

void save_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<json> personas, items, tools, queries;
  for (const auto& p : corpus.personas) personas.push_back(to_json(p));
  for (const auto& store : corpus.stores) {
    for (const auto& item : store.items) items.push_back(to_json(item, store.persona_id));
  }
  for (const auto& t : corpus.toolbox) tools.push_back(to_json(t));
  for (const auto& q : corpus.queries) queries.push_back(to_json(q));
  write_lines(dir / kDatasetFiles[0], personas);
  write_lines(dir / kDatasetFiles[1], items);
  write_lines(dir / kDatasetFiles[2], tools);
  write_lines(dir / kDatasetFiles[3], queries);
}

Corpus load_corpus(const std::filesystem::path& dir) {
  Corpus corpus;
  std::unordered_map<std::string, std::size_t> persona_pos;

  read_lines(dir / kDatasetFiles[0], [&](const Record& r, std::size_t) {
    Persona p;
    p.id = r.str("id");
    if (persona_pos.count(p.id)) r.fail("id", "duplicate persona id '" + p.id + "'");
    p.attributes = r.str_map("attributes");
    const auto& profile = r.at("app_usage_profile");
    if (!profile.is_object()) r.fail("app_usage_profile", "expected object");
    for (auto it = profile.begin(); it != profile.end(); ++it) {
      auto app = parse_app(it.key());
      if (!app) r.fail("app_usage_profile." + it.key(), "unknown app");
      if (!it.value().is_number()) r.fail("app_usage_profile." + it.key(), "expected number");
      p.app_usage_profile[*app] = it.value().get<double>();
    }
    persona_pos.emplace(p.id, corpus.personas.size());
    corpus.personas.push_back(std::move(p));
  });

  // stores[persona][app] in canonical order, materialized after reading
  std::vector<std::array<std::vector<ContextItem>, kNumApps>> grouped(corpus.personas.size());
  std::vector<std::unordered_set<std::string>> seen_ids(corpus.personas.size());
  read_lines(dir / kDatasetFiles[1], [&](const Record& r, std::size_t) {
    const std::string persona_id = r.str("persona_id");
    auto pit = persona_pos.find(persona_id);
    if (pit == persona_pos.end()) r.fail("persona_id", "unknown persona '" + persona_id + "'");
    ContextItem item;
    item.id = r.str("id");
    if (!seen_ids[pit->second].insert(item.id).second) r.fail("id", "duplicate item id '" + item.id + "'");
    item.app = r.app("app");
    item.title = r.str("title");
    item.body = r.str("body");
    item.timestamp = r.time("timestamp");
    item.categorical_tags = r.str_map("categorical_tags");
    const auto& ac = r.at("access_count");
    if (!ac.is_number_integer()) r.fail("access_count", "expected integer");
    item.access_count = ac.get<std::int64_t>();
    if (item.access_count < 0) r.fail("access_count", "negative");
    grouped[pit->second][app_index(item.app)].push_back(std::move(item));
  });
  for (std::size_t p = 0; p < grouped.size(); ++p) {
    for (AppId app : kAllApps) {
      auto& items = grouped[p][app_index(app)];
      if (items.empty()) continue;
      corpus.stores.push_back({corpus.personas[p].id, app, std::move(items)});
    }
  }

  std::unordered_set<std::string> tool_names;
  read_lines(dir / kDatasetFiles[2], [&](const Record& r, std::size_t) {
    Tool t;
    t.name = r.str("name");
    t.app = r.app("app");
    t.description = r.str("description");
    if (!tool_names.insert(t.name).second) r.fail("name", "duplicate tool '" + t.name + "'");
    const auto& params = r.at("params");
    if (!params.is_array()) r.fail("params", "expected array");
    for (const auto& pj : params) {
      if (!pj.is_object() || !pj.contains("name") || !pj["name"].is_string() ||
          !pj.contains("required") || !pj["required"].is_boolean()) {
        r.fail("params", "each param needs string 'name' and boolean 'required'");
      }
      ToolParam param;
      param.name = pj["name"].get<std::string>();
      param.description = pj.value("description", "");
      param.required = pj["required"].get<bool>();
      t.params.push_back(std::move(param));
    }
    corpus.toolbox.push_back(std::move(t));
  });

  std::unordered_set<std::string> query_ids;
  read_lines(dir / kDatasetFiles[3], [&](const Record& r, std::size_t) {
    LabeledQuery q;
    q.id = r.str("id");
    if (!query_ids.insert(q.id).second) r.fail("id", "duplicate query id '" + q.id + "'");
    q.persona_id = r.str("persona_id");
    if (!persona_pos.count(q.persona_id)) r.fail("persona_id", "unknown persona '" + q.persona_id + "'");
    q.text = r.str("text");
    q.timestamp = r.time("timestamp");
    q.gold_context_ids = r.str_list("gold_context_ids");
    q.gold_tools = r.str_list("gold_tools");
    const auto& plan = r.at("gold_plan");
    if (!plan.is_object()) r.fail("gold_plan", "expected object");
    if (!plan.contains("api") || !plan["api"].is_string()) r.fail("gold_plan.api", "expected string");
    q.gold_plan.api = plan["api"].get<std::string>();
    if (!plan.contains("args") || !plan["args"].is_object()) r.fail("gold_plan.args", "expected object");
    for (auto it = plan["args"].begin(); it != plan["args"].end(); ++it) {
      if (!it.value().is_string()) r.fail("gold_plan.args." + it.key(), "expected string");
      q.gold_plan.args.emplace(it.key(), it.value().get<std::string>());
    }
    auto split = parse_split(r.str("split"));
    if (!split) r.fail("split", "expected 'train' or 'test'");
    q.split = *split;
    corpus.queries.push_back(std::move(q));
  });
  return corpus;
}

}  // namespace ctrag
