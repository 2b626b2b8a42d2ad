#include "ctrag/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "ctrag/errors.hpp"
#include "ctrag/parallel.hpp"
#include "ctrag/text.hpp"

namespace ctrag {

namespace {

template <typename E, std::size_t N>
std::optional<E> parse_enum(std::string_view name, const std::array<std::pair<E, std::string_view>, N>& table) {
  for (const auto& [value, text] : table) {
    if (text == name) return value;
  }
  return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view enum_name(E value, const std::array<std::pair<E, std::string_view>, N>& table) {
  for (const auto& [v, text] : table) {
    if (v == value) return text;
  }
  return "?";
}

constexpr std::array<std::pair<ContextMode, std::string_view>, 5> kContextModes = {{
    {ContextMode::kNone, "none"},
    {ContextMode::kBm25, "bm25"},
    {ContextMode::kSemantic, "semantic"},
    {ContextMode::kLtrRrf, "ltr-rrf"},
    {ContextMode::kOracle, "oracle"},
}};
constexpr std::array<std::pair<ToolMode, std::string_view>, 3> kToolModes = {{
    {ToolMode::kRetrieve, "retrieve"},
    {ToolMode::kOracle, "oracle"},
    {ToolMode::kAll, "all"},
}};
constexpr std::array<std::pair<PlannerKind, std::string_view>, 2> kPlanners = {{
    {PlannerKind::kMock, "mock"},
    {PlannerKind::kExternal, "external"},
}};
constexpr std::array<std::pair<AugmenterKind, std::string_view>, 2> kAugmenters = {{
    {AugmenterKind::kIdentity, "identity"},
    {AugmenterKind::kHint, "hint"},
}};
constexpr std::array<std::pair<Stage, std::string_view>, 3> kStages = {{
    {Stage::kContext, "context"},
    {Stage::kTools, "tools"},
    {Stage::kPlan, "e2e"},
}};

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

std::string_view context_mode_name(ContextMode mode) { return enum_name(mode, kContextModes); }
std::optional<ContextMode> parse_context_mode(std::string_view name) { return parse_enum(name, kContextModes); }
std::string_view tool_mode_name(ToolMode mode) { return enum_name(mode, kToolModes); }
std::optional<ToolMode> parse_tool_mode(std::string_view name) { return parse_enum(name, kToolModes); }
std::string_view planner_name(PlannerKind kind) { return enum_name(kind, kPlanners); }
std::optional<PlannerKind> parse_planner(std::string_view name) { return parse_enum(name, kPlanners); }
std::string_view augmenter_name(AugmenterKind kind) { return enum_name(kind, kAugmenters); }
std::optional<AugmenterKind> parse_augmenter(std::string_view name) { return parse_enum(name, kAugmenters); }
std::string_view stage_name(Stage stage) { return enum_name(stage, kStages); }
std::optional<Stage> parse_stage(std::string_view name) { return parse_enum(name, kStages); }

PipelineConfig pipeline_preset(std::string_view name) {
  PipelineConfig c;
  if (name == "lower-bound") {
    c.context_mode = ContextMode::kNone;
    c.tool_mode = ToolMode::kAll;
  } else if (name == "rag") {
    c.context_mode = ContextMode::kNone;
  } else if (name == "context-tuned") {
    c.context_mode = ContextMode::kLtrRrf;
  } else if (name == "upper-bound") {
    c.context_mode = ContextMode::kOracle;
    c.tool_mode = ToolMode::kOracle;
  } else {
    throw ConfigError("unknown preset " + std::string(name));
  }
  return c;
}

void validate_pipeline_config(const PipelineConfig& c) {
  if (c.k_context < 1) throw ConfigError("k_context must be >= 1");
  if (c.k_tools < 1) throw ConfigError("k_tools must be >= 1");
  if (c.ks.empty()) throw ConfigError("at least one K is required");
  for (auto k : c.ks) {
    if (k < 1) throw ConfigError("K values must be >= 1");
  }
  if (!(c.fusion.rrf_k > 0.0)) throw ConfigError("rrf_k must be > 0");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  if (c.planner == PlannerKind::kExternal && c.last_stage == Stage::kPlan) {
    if (c.external.url.empty()) throw ConfigError("external planner needs a URL");
    if (c.external.timeout_ms < 1) throw ConfigError("planner timeout must be >= 1 ms");
    if (c.external.concurrency < 1) throw ConfigError("planner concurrency must be >= 1");
  }
}

std::string tool_document(const Tool& tool) {
  std::string doc = tool.name + " " + tool.description;
  for (const auto& p : tool.params) doc += " " + p.name;
  return doc;
}

ToolIndex::ToolIndex(std::vector<Tool> toolbox, std::size_t dims, int ngram) : toolbox_(std::move(toolbox)) {
  std::vector<IndexedDoc> docs;
  for (const auto& t : toolbox_) docs.push_back({t.name, tool_document(t)});
  Analyzer analyzer = [ngram](std::string_view text) { return tokenize_with_subwords(text, ngram); };
  embedder_ = std::make_shared<HashedTfidfEmbedder>(std::make_shared<const InvertedIndex>(docs, analyzer), dims);
  embed_tools();
}

ToolIndex::ToolIndex(std::vector<Tool> toolbox, std::shared_ptr<const Embedder> embedder)
    : toolbox_(std::move(toolbox)), embedder_(std::move(embedder)) {
  if (!embedder_) throw ConfigError("tool index needs an embedder");
  embed_tools();
}

void ToolIndex::embed_tools() {
  embeddings_.clear();
  for (const auto& t : toolbox_) embeddings_.push_back(embedder_->embed(t.name, tool_document(t)));
}

std::string tool_search_text(std::string_view query_text, const std::vector<const ContextItem*>& context) {
  std::string full(query_text);
  for (const auto* item : context) full += " " + item_text(*item);
  std::istringstream words(full);
  std::string out, word;
  std::size_t count = 0;
  while (count < kMaxSearchTokens && words >> word) {
    if (count++) out += ' ';
    out += word;
  }
  return out;
}

RankedList retrieve_tools(const LabeledQuery& query, const std::vector<const ContextItem*>& context,
                          const ToolIndex& tools, std::size_t k_tools) {
  if (tools.toolbox().empty()) throw std::invalid_argument("retrieve_tools: toolbox is empty");
  // Keyed by query id only when there is no context, so precomputed query vectors still apply.
  const std::string key = context.empty() ? query.id : query.id + "+context";
  const Embedding q = tools.embedder().embed(key, tool_search_text(query.text, context));
  std::vector<EmbeddingCandidate> cands;
  for (std::size_t i = 0; i < tools.toolbox().size(); ++i) {
    cands.push_back({tools.toolbox()[i].name, &tools.embeddings()[i]});
  }
  return cosine_topk(q, cands, k_tools);
}

Plan mock_plan(const LabeledQuery& query, const std::vector<const ContextItem*>& context, const RankedList& tools,
               const std::vector<Tool>& toolbox) {
  if (tools.empty()) throw std::invalid_argument("mock_plan: no candidate tools");
  const auto query_tokens = tokenize(query.text);
  const std::set<std::string> query_set(query_tokens.begin(), query_tokens.end());
  auto overlap = [&](const ContextItem& item) {
    std::string fields = item.title;
    for (const auto& [k, v] : item.categorical_tags) fields += " " + v;
    std::set<std::string> seen;
    std::size_t n = 0;
    for (const auto& t : tokenize(fields)) {
      if (query_set.count(t) && seen.insert(t).second) ++n;
    }
    return n;
  };
  auto read_param = [](const ContextItem& item, const std::string& name) -> std::optional<std::string> {
    if (name == "title") return item.title;
    auto it = item.categorical_tags.find(name);
    if (it == item.categorical_tags.end()) return std::nullopt;
    return it->second;
  };

  for (const auto& entry : tools) {
    auto tool = std::find_if(toolbox.begin(), toolbox.end(), [&](const Tool& t) { return t.name == entry.item_id; });
    if (tool == toolbox.end()) continue;
    const ContextItem* best = nullptr;
    std::size_t best_overlap = 0;
    bool needs_args = false;
    for (const auto& p : tool->params) needs_args |= p.required;
    if (!needs_args) return Plan{tool->name, {}, false};
    for (const auto* item : context) {
      if (item->app != tool->app) continue;
      bool fillable = true;
      for (const auto& p : tool->params) {
        if (p.required && !read_param(*item, p.name)) {
          fillable = false;
          break;
        }
      }
      if (!fillable) continue;
      const std::size_t o = overlap(*item);
      if (best == nullptr || o > best_overlap) {
        best = item;
        best_overlap = o;
      }
    }
    if (best == nullptr) continue;
    Plan plan{tool->name, {}, false};
    for (const auto& p : tool->params) {
      if (p.required) plan.args[p.name] = *read_param(*best, p.name);
    }
    return plan;
  }
  return Plan{std::string(kDefaultApi), {}, false};
}

PlanOutcome MockPlanner::plan(const PlanRequest& request) const {
  return {mock_plan(*request.query, request.context, request.tools, *request.toolbox), std::nullopt};
}

namespace {

RankedList oracle_tools(const LabeledQuery& query, std::size_t k) {
  std::vector<RankedEntry> entries;
  const double n = static_cast<double>(query.gold_tools.size());
  for (std::size_t i = 0; i < query.gold_tools.size(); ++i) entries.push_back({query.gold_tools[i], n - static_cast<double>(i)});
  return RankedList::from_scores(std::move(entries), k);
}

RankedList all_tools(const std::vector<Tool>& toolbox) {
  std::vector<RankedEntry> entries;
  const double n = static_cast<double>(toolbox.size());
  for (std::size_t i = 0; i < toolbox.size(); ++i) entries.push_back({toolbox[i].name, n - static_cast<double>(i)});
  return RankedList::from_scores(std::move(entries), entries.size());
}

RankedList truncate(const RankedList& list, std::size_t k) {
  std::vector<RankedEntry> top(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(std::min(k, list.size())));
  return RankedList::from_sorted(std::move(top));
}

}  // namespace

PipelineResult run_pipeline(const Corpus& corpus, Split split, const PipelineConfig& config,
                            const PipelineArtifacts& artifacts) {
  validate_pipeline_config(config);
  const bool retrieval = config.context_mode == ContextMode::kBm25 || config.context_mode == ContextMode::kSemantic ||
                         config.context_mode == ContextMode::kLtrRrf;
  if (retrieval && artifacts.context_index == nullptr) throw ConfigError("context retrieval needs a context index");
  if (config.context_mode == ContextMode::kLtrRrf && artifacts.ltr_model == nullptr) {
    throw ConfigError("context mode ltr-rrf needs a trained model");
  }
  if (artifacts.context_index && &artifacts.context_index->corpus() != &corpus) {
    throw ConfigError("context index was built for a different corpus");
  }
  const bool tools_stage = config.last_stage != Stage::kContext;
  const bool plan_stage = config.last_stage == Stage::kPlan;
  if (tools_stage && config.tool_mode == ToolMode::kRetrieve && artifacts.tool_index == nullptr) {
    throw ConfigError("tool retrieval needs a tool index");
  }

  std::unique_ptr<Planner> owned_planner;
  const Planner* planner = artifacts.planner;
  if (plan_stage && planner == nullptr) {
    if (config.planner == PlannerKind::kMock) owned_planner = std::make_unique<MockPlanner>();
    else owned_planner = std::make_unique<ExternalPlanner>(config.external);
    planner = owned_planner.get();
  }

  FusionConfig fusion = config.fusion;
  switch (config.context_mode) {
    case ContextMode::kBm25: fusion.backend = Backend::kBm25; break;
    case ContextMode::kSemantic: fusion.backend = Backend::kSemantic; break;
    case ContextMode::kLtrRrf: fusion.backend = Backend::kLtr; break;
    case ContextMode::kOracle: fusion.backend = Backend::kOracle; break;
    case ContextMode::kNone: break;
  }
  RetrievalArtifacts retrieval_artifacts{artifacts.context_index, artifacts.ltr_model, artifacts.bm25};

  const CorpusView view(corpus);
  const auto queries = view.queries(split);
  std::unordered_set<std::string> toolbox_names;
  for (const auto& t : corpus.toolbox) toolbox_names.insert(t.name);
  const std::size_t max_k = *std::max_element(config.ks.begin(), config.ks.end());

  PipelineResult result;
  result.traces.resize(queries.size());
  result.records.resize(queries.size());

  parallel_for(queries.size(), config.threads, [&](std::size_t qi) {
    const LabeledQuery& query = *queries[qi];
    PipelineTrace& trace = result.traces[qi];
    EvalRecord& record = result.records[qi];
    trace.query_id = query.id;
    record.query_id = query.id;

    auto start = std::chrono::steady_clock::now();
    std::vector<const ContextItem*> context;
    if (config.context_mode != ContextMode::kNone) {
      LabeledQuery augmented = query;
      if (config.augmenter == AugmenterKind::kHint) {
        const Persona* persona = view.persona(query.persona_id);
        if (persona == nullptr) throw ConfigError("query " + query.id + " has unknown persona");
        augmented.text = augment_query(query.text, HabitHintAugmenter(*persona));
      }
      const auto stores = view.stores_of(query.persona_id);
      trace.retrieved_context =
          federated_retrieve(augmented, stores, fusion, retrieval_artifacts, std::max(max_k, config.k_context));
      const std::set<std::string> gold(query.gold_context_ids.begin(), query.gold_context_ids.end());
      RetrievalJudgment judgment{query.id, gold, std::nullopt};
      for (auto k : config.ks) {
        record.context_recall[k] = recall_at_k(trace.retrieved_context, gold, k);
        record.context_ndcg[k] = ndcg_at_k(trace.retrieved_context, judgment, k);
      }
      for (const auto& id : trace.retrieved_context.top_ids(config.k_context)) context.push_back(view.item(id));
    }
    trace.timings.context_ms = elapsed_ms(start);
    if (!tools_stage) return;

    start = std::chrono::steady_clock::now();
    switch (config.tool_mode) {
      case ToolMode::kRetrieve:
        trace.retrieved_tools = retrieve_tools(query, context, *artifacts.tool_index, std::max(max_k, config.k_tools));
        break;
      case ToolMode::kOracle: trace.retrieved_tools = oracle_tools(query, std::max(max_k, config.k_tools)); break;
      case ToolMode::kAll: trace.retrieved_tools = all_tools(corpus.toolbox); break;
    }
    const std::set<std::string> gold_tools(query.gold_tools.begin(), query.gold_tools.end());
    for (auto k : config.ks) record.tool_recall[k] = recall_at_k(trace.retrieved_tools, gold_tools, k);
    trace.timings.tools_ms = elapsed_ms(start);
    if (!plan_stage) return;

    start = std::chrono::steady_clock::now();
    PlanRequest request;
    request.query = &query;
    request.context = context;
    request.tools = config.tool_mode == ToolMode::kAll ? trace.retrieved_tools
                                                       : truncate(trace.retrieved_tools, config.k_tools);
    request.toolbox = &corpus.toolbox;
    PlanOutcome outcome = planner->plan(request);
    trace.plan = outcome.plan;
    trace.error = outcome.error;
    record.plan = outcome.error ? AstMatch{} : ast_match(outcome.plan, query.gold_plan, toolbox_names);
    trace.timings.plan_ms = elapsed_ms(start);
  });

  result.report = aggregate(result.records);
  return result;
}

namespace {

nlohmann::json ranked_json(const RankedList& list) {
  auto arr = nlohmann::json::array();
  for (const auto& e : list) arr.push_back({e.item_id, e.score});
  return arr;
}

}  // namespace

std::string traces_jsonl(const std::vector<PipelineTrace>& traces) {
  std::string out;
  for (const auto& t : traces) {
    nlohmann::json j = {{"query_id", t.query_id},
                        {"context", ranked_json(t.retrieved_context)},
                        {"tools", ranked_json(t.retrieved_tools)},
                        {"plan", nlohmann::json::parse(canonical_plan_string(t.plan))},
                        {"malformed", t.plan.malformed}};
    if (t.error) j["error"] = *t.error;
    out += j.dump() + "\n";
  }
  return out;
}

std::string timings_csv(const std::vector<PipelineTrace>& traces) {
  std::string out = "query_id,context_ms,tools_ms,plan_ms\n";
  char buf[128];
  for (const auto& t : traces) {
    std::snprintf(buf, sizeof buf, ",%.3f,%.3f,%.3f\n", t.timings.context_ms, t.timings.tools_ms, t.timings.plan_ms);
    out += t.query_id + buf;
  }
  return out;
}

}  // namespace ctrag
