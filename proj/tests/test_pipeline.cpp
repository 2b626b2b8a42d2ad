#include <doctest.h>

#include <random>

#include "ctrag/context_index.hpp"
#include "ctrag/errors.hpp"
#include "ctrag/pipeline.hpp"
#include "stubs.hpp"
#include "support.hpp"

using namespace ctrag;
using ctrag::testing::make_item;

namespace {

RankedList tools_in_order(const std::vector<std::string>& names) {
  std::vector<RankedEntry> e;
  for (std::size_t i = 0; i < names.size(); ++i) e.push_back({names[i], static_cast<double>(names.size() - i)});
  return RankedList::from_sorted(std::move(e));
}

struct Fixture {
  Corpus corpus;
  std::unique_ptr<ContextIndex> context;
  std::unique_ptr<ToolIndex> tools;
  LtrModel model;

  explicit Fixture(int personas) {
    GeneratorConfig gc;
    gc.n_personas = personas;
    gc.epoch_start = ctrag::testing::ts("2023-12-07T11:18:19Z");
    corpus = generate_corpus(gc);
    context = std::make_unique<ContextIndex>(corpus, make_context_embedder(corpus, 512, 3));
    tools = std::make_unique<ToolIndex>(corpus.toolbox);
    std::vector<QueryGroup> groups;
    for (const auto* q : CorpusView(corpus).queries(Split::kTrain)) groups.push_back(build_query_group(*q, *context));
    TrainConfig tc;
    tc.n_trees = 20;
    model = train(groups, tc).model;
  }

  PipelineArtifacts artifacts(const Planner* planner = nullptr) const {
    return PipelineArtifacts{context.get(), tools.get(), &model, planner, {}};
  }
};

const Fixture& fixture() {
  static const Fixture f(40);
  return f;
}

}  // namespace

TEST_CASE("mock planner") {
  const Corpus c = ctrag::testing::toy_corpus();
  const auto& q = c.queries[0];
  const std::vector<const ContextItem*> ctx = {&c.stores[0].items[0], &c.stores[1].items[0]};

  SUBCASE("gold tool first with its params in context") {
    const Plan p = mock_plan(q, ctx, tools_in_order({"get_event_details", "read_note"}), c.toolbox);
    CHECK(p == q.gold_plan);
  }
  SUBCASE("tool of another app is skipped") {
    const Plan p = mock_plan(q, {&c.stores[1].items[0]}, tools_in_order({"get_event_details", "read_note"}), c.toolbox);
    CHECK(p.api == "read_note");
    CHECK(p.args.at("title") == "Trip to Seattle Plan");
  }
  SUBCASE("nothing fillable falls back to default") {
    const Plan p = mock_plan(q, {}, tools_in_order({"get_event_details", "read_note"}), c.toolbox);
    CHECK(p.api == "default");
    CHECK(p.args.empty());
  }
  SUBCASE("tool without required params needs no context") {
    CHECK(mock_plan(q, {}, tools_in_order({"get_upcoming_events"}), c.toolbox).api == "get_upcoming_events");
  }
  SUBCASE("tag-valued params") {
    Tool t{"get_location", AppId::kCalendar, "where an event happens", {{"location", "place", true}}};
    auto box = c.toolbox;
    box.push_back(t);
    const Plan p = mock_plan(q, {&c.stores[0].items[0], &c.stores[0].items[1]}, tools_in_order({"get_location"}), box);
    CHECK(p.args.at("location") == "Main Street Clinic");
  }
  SUBCASE("query overlap picks among same-app items") {
    const std::vector<const ContextItem*> both = {&c.stores[0].items[1], &c.stores[0].items[0]};
    CHECK(mock_plan(q, both, tools_in_order({"get_event_details"}), c.toolbox).args.at("title") == "Guitar Class");
  }
  SUBCASE("names outside the toolbox are ignored") {
    CHECK(mock_plan(q, ctx, tools_in_order({"made_up_tool"}), c.toolbox).api == "default");
  }
  CHECK_THROWS_AS(mock_plan(q, ctx, RankedList{}, c.toolbox), std::invalid_argument);
}

TEST_CASE("property: mock planner never invents an api") {
  const Fixture& f = fixture();
  std::set<std::string> allowed{"default"};
  for (const auto& t : f.corpus.toolbox) allowed.insert(t.name);
  std::mt19937_64 rng(31);
  CorpusView view(f.corpus);
  for (const auto& q : f.corpus.queries) {
    std::vector<const ContextItem*> ctx;
    for (const auto* s : view.stores_of(q.persona_id)) {
      for (const auto& item : s->items) {
        if (rng() % 3 == 0) ctx.push_back(&item);
      }
    }
    std::vector<std::string> names = {"bogus_api"};
    for (std::size_t i = 0; i < 4; ++i) names.push_back(f.corpus.toolbox[rng() % f.corpus.toolbox.size()].name);
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    std::shuffle(names.begin(), names.end(), rng);
    CHECK(allowed.count(mock_plan(q, ctx, tools_in_order(names), f.corpus.toolbox).api) == 1);
  }
}

TEST_CASE("tool retrieval") {
  std::vector<Tool> box = {{"play_song", AppId::kMusic, "play music", {}},
                           {"track_package", AppId::kMail, "follow a package delivery", {}}};
  const ToolIndex index(box, 64, 3);
  LabeledQuery q;
  q.id = "q";
  q.text = "where is my stuff";
  const ContextItem parcel = make_item("i1", AppId::kMail, "Parcel update", "your package is out for delivery");

  const auto without = retrieve_tools(q, {}, index, 2);
  const auto with = retrieve_tools(q, {&parcel}, index, 2);
  CHECK(*with.rank_of("track_package") <= *without.rank_of("track_package"));
  CHECK(with[0].item_id == "track_package");

  const ToolIndex single({box[0]}, 64, 3);
  CHECK(retrieve_tools(q, {&parcel}, single, 3).ids() == std::vector<std::string>{"play_song"});
  CHECK_THROWS_AS(retrieve_tools(q, {}, ToolIndex(std::vector<Tool>{}, 64, 3), 3), std::invalid_argument);

  CHECK(tool_document(Tool{"create_note", AppId::kNotes, "make a note", {{"title", "", true}, {"content", "", true}}}) ==
        "create_note make a note title content");
}

TEST_CASE("search text composition and truncation") {
  const ContextItem a = make_item("a", AppId::kNotes, "Title A", "body a");
  CHECK(tool_search_text("find it", {&a}) == "find it Title A. body a");
  CHECK(tool_search_text("find it", {}) == "find it");
  std::string long_body;
  for (int i = 0; i < 600; ++i) long_body += "w" + std::to_string(i) + " ";
  const ContextItem big = make_item("b", AppId::kNotes, "Big", long_body);
  const auto text = tool_search_text("q", {&big});
  CHECK(std::count(text.begin(), text.end(), ' ') == static_cast<long>(kMaxSearchTokens) - 1);
}

TEST_CASE("config validation and presets") {
  PipelineConfig c;
  CHECK_NOTHROW(validate_pipeline_config(c));
  c.k_context = 0;
  CHECK_THROWS_AS(validate_pipeline_config(c), ConfigError);
  c = PipelineConfig{};
  c.ks = {};
  CHECK_THROWS_AS(validate_pipeline_config(c), ConfigError);
  c = PipelineConfig{};
  c.planner = PlannerKind::kExternal;
  CHECK_THROWS_AS(validate_pipeline_config(c), ConfigError);

  CHECK(pipeline_preset("lower-bound").context_mode == ContextMode::kNone);
  CHECK(pipeline_preset("lower-bound").tool_mode == ToolMode::kAll);
  CHECK(pipeline_preset("rag").tool_mode == ToolMode::kRetrieve);
  CHECK(pipeline_preset("context-tuned").context_mode == ContextMode::kLtrRrf);
  CHECK(pipeline_preset("upper-bound").tool_mode == ToolMode::kOracle);
  CHECK_THROWS_AS(pipeline_preset("best"), ConfigError);
  CHECK(PipelineConfig{}.fusion.mode == FusionMode::kFuseRankers);
  for (auto m : {ContextMode::kNone, ContextMode::kBm25, ContextMode::kSemantic, ContextMode::kLtrRrf, ContextMode::kOracle}) {
    CHECK(parse_context_mode(context_mode_name(m)) == m);
  }
  CHECK_FALSE(parse_context_mode("ltr").has_value());
}

TEST_CASE("run_pipeline structure") {
  const Fixture& f = fixture();
  const auto n_test = CorpusView(f.corpus).queries(Split::kTest).size();
  REQUIRE(n_test > 0);

  PipelineConfig none;
  none.context_mode = ContextMode::kNone;
  const auto r = run_pipeline(f.corpus, Split::kTest, none, f.artifacts());
  CHECK(r.traces.size() == n_test);
  CHECK(r.report.n_queries == n_test);
  for (const auto& t : r.traces) CHECK(t.retrieved_context.empty());
  CHECK(r.report.context_recall.empty());
  CHECK(r.report.tool_recall.size() == 4);
  CHECK(r.report.plan_accuracy.has_value());

  PipelineConfig ctx_only;
  ctx_only.last_stage = Stage::kContext;
  const auto c = run_pipeline(f.corpus, Split::kTest, ctx_only, f.artifacts());
  CHECK(c.report.tool_recall.empty());
  CHECK_FALSE(c.report.plan_accuracy.has_value());
  for (const auto& t : c.traces) CHECK(t.retrieved_context.size() >= 1);

  PipelineConfig oracle;
  oracle.context_mode = ContextMode::kOracle;
  oracle.tool_mode = ToolMode::kOracle;
  const auto o = run_pipeline(f.corpus, Split::kTest, oracle, f.artifacts());
  CHECK(o.report.context_recall.at(10) == doctest::Approx(100.0));
  CHECK(*o.report.plan_accuracy >= *r.report.plan_accuracy);
}

TEST_CASE("run_pipeline is deterministic and thread-count independent") {
  const Fixture& f = fixture();
  PipelineConfig cfg;
  const auto a = run_pipeline(f.corpus, Split::kTest, cfg, f.artifacts());
  cfg.threads = 4;
  const auto b = run_pipeline(f.corpus, Split::kTest, cfg, f.artifacts());
  CHECK(traces_jsonl(a.traces) == traces_jsonl(b.traces));
  CHECK(a.report.context_recall == b.report.context_recall);
  CHECK(a.report.plan_accuracy == b.report.plan_accuracy);
  const auto csv = timings_csv(a.traces);
  CHECK(csv.rfind("query_id,context_ms,tools_ms,plan_ms\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(a.traces.size()) + 1);
}

TEST_CASE("run_pipeline refuses missing artifacts before running") {
  const Fixture& f = fixture();
  PipelineConfig cfg;
  PipelineArtifacts art = f.artifacts();
  art.ltr_model = nullptr;
  CHECK_THROWS_AS(run_pipeline(f.corpus, Split::kTest, cfg, art), ConfigError);
  art = f.artifacts();
  art.tool_index = nullptr;
  CHECK_THROWS_AS(run_pipeline(f.corpus, Split::kTest, cfg, art), ConfigError);
  art = f.artifacts();
  art.context_index = nullptr;
  cfg.context_mode = ContextMode::kSemantic;
  CHECK_THROWS_AS(run_pipeline(f.corpus, Split::kTest, cfg, art), ConfigError);
  const Corpus copy = f.corpus;
  CHECK_THROWS_AS(run_pipeline(copy, Split::kTest, cfg, f.artifacts()), ConfigError);
}

TEST_CASE("hallucination rate equals the injected fraction") {
  const Fixture& f = fixture();
  const auto queries = CorpusView(f.corpus).queries(Split::kTest);
  std::set<std::string> faulty;
  for (std::size_t i = 0; i < queries.size(); i += 4) faulty.insert(queries[i]->id);
  const ctrag::testing::FaultInjectingPlanner stub(faulty);
  PipelineConfig cfg;
  cfg.context_mode = ContextMode::kNone;
  const auto r = run_pipeline(f.corpus, Split::kTest, cfg, f.artifacts(&stub));
  const double injected = 100.0 * static_cast<double>(faulty.size()) / static_cast<double>(queries.size());
  CHECK(*r.report.hallucination == injected);
  CHECK(*r.report.plan_accuracy == 100.0 - injected);
}

TEST_CASE("hint augmenter runs through the pipeline") {
  const Fixture& f = fixture();
  PipelineConfig cfg;
  cfg.context_mode = ContextMode::kSemantic;
  cfg.augmenter = AugmenterKind::kHint;
  cfg.last_stage = Stage::kContext;
  const auto r = run_pipeline(f.corpus, Split::kTest, cfg, f.artifacts());
  CHECK(r.traces.size() == CorpusView(f.corpus).queries(Split::kTest).size());
}
