#pragma once

#include <array>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "ctrag/context_index.hpp"
#include "ctrag/corpus.hpp"
#include "ctrag/embedding.hpp"
#include "ctrag/fusion.hpp"
#include "ctrag/ltr.hpp"
#include "ctrag/metrics.hpp"
#include "ctrag/ranked_list.hpp"

namespace ctrag {

enum class ContextMode { kNone, kBm25, kSemantic, kLtrRrf, kOracle };
// Where the planner's candidate tools come from: tool retrieval, the gold tools, or the
// whole toolbox in toolbox order.
enum class ToolMode { kRetrieve, kOracle, kAll };
enum class PlannerKind { kMock, kExternal };
enum class AugmenterKind { kIdentity, kHint };
// Last stage executed; later stages are skipped and not scored.
enum class Stage { kContext, kTools, kPlan };

std::string_view context_mode_name(ContextMode mode);
std::optional<ContextMode> parse_context_mode(std::string_view name);
std::string_view tool_mode_name(ToolMode mode);
std::optional<ToolMode> parse_tool_mode(std::string_view name);
std::string_view planner_name(PlannerKind kind);
std::optional<PlannerKind> parse_planner(std::string_view name);
std::string_view augmenter_name(AugmenterKind kind);
std::optional<AugmenterKind> parse_augmenter(std::string_view name);
std::string_view stage_name(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);

struct ExternalPlannerConfig {
  std::string url;  // e.g. http://127.0.0.1:8080/plan
  int timeout_ms = 30000;
  int concurrency = 4;
};

struct PipelineConfig {
  ContextMode context_mode = ContextMode::kLtrRrf;
  std::size_t k_context = 5;
  std::size_t k_tools = 3;
  PlannerKind planner = PlannerKind::kMock;
  FusionConfig fusion{.mode = FusionMode::kFuseRankers};
  ToolMode tool_mode = ToolMode::kRetrieve;
  AugmenterKind augmenter = AugmenterKind::kIdentity;
  std::vector<std::size_t> ks = {1, 3, 5, 10};
  Stage last_stage = Stage::kPlan;
  ExternalPlannerConfig external;
  int threads = 1;
};

/// Named settings: lower-bound, rag, context-tuned, upper-bound. Throws ConfigError otherwise.
PipelineConfig pipeline_preset(std::string_view name);
inline constexpr std::array<std::string_view, 4> kPresetNames = {"lower-bound", "rag", "context-tuned",
                                                                 "upper-bound"};

/// Throws ConfigError on out-of-range values.
void validate_pipeline_config(const PipelineConfig& config);

/// "name description param-names": what tool retrieval embeds for each tool.
std::string tool_document(const Tool& tool);

/// Tool embeddings plus the embedder used for search text. idf comes from the tool documents.
class ToolIndex {
 public:
  explicit ToolIndex(std::vector<Tool> toolbox, std::size_t dims = kDefaultEmbeddingDims,
                     int ngram = kDefaultSubwordNgram);
  ToolIndex(std::vector<Tool> toolbox, std::shared_ptr<const Embedder> embedder);

  const std::vector<Tool>& toolbox() const { return toolbox_; }
  const Embedder& embedder() const { return *embedder_; }
  const std::vector<Embedding>& embeddings() const { return embeddings_; }

 private:
  void embed_tools();

  std::vector<Tool> toolbox_;
  std::shared_ptr<const Embedder> embedder_;
  std::vector<Embedding> embeddings_;
};

inline constexpr std::size_t kMaxSearchTokens = 512;

/// Query text followed by "title. body" of each context item in order, cut to
/// kMaxSearchTokens whitespace-separated tokens.
std::string tool_search_text(std::string_view query_text, const std::vector<const ContextItem*>& context);

/// Cosine top-k tools for the query plus context. Throws std::invalid_argument on an empty toolbox.
RankedList retrieve_tools(const LabeledQuery& query, const std::vector<const ContextItem*>& context,
                          const ToolIndex& tools, std::size_t k_tools);

struct PlanRequest {
  const LabeledQuery* query = nullptr;
  std::vector<const ContextItem*> context;
  RankedList tools;
  const std::vector<Tool>* toolbox = nullptr;
};

struct PlanOutcome {
  Plan plan;
  std::optional<std::string> error;
};

class Planner {
 public:
  virtual ~Planner() = default;
  virtual PlanOutcome plan(const PlanRequest& request) const = 0;
};

/// Deterministic stand-in for an LLM planner. Walks the tools in rank order and returns the
/// first one whose required params can all be read off one same-app context item (param
/// "title" from the item title, others from its tags); among such items the one sharing the
/// most tokens with the query wins, then the better-ranked one. Otherwise Plan{"default"}.
/// Throws std::invalid_argument when `tools` is empty.
Plan mock_plan(const LabeledQuery& query, const std::vector<const ContextItem*>& context, const RankedList& tools,
               const std::vector<Tool>& toolbox);

class MockPlanner final : public Planner {
 public:
  PlanOutcome plan(const PlanRequest& request) const override;
};

/// JSON-over-HTTP planner. Network failures and timeouts become PlanOutcome::error;
/// unparseable replies become a malformed plan.
class ExternalPlanner final : public Planner {
 public:
  explicit ExternalPlanner(ExternalPlannerConfig config);
  PlanOutcome plan(const PlanRequest& request) const override;

 private:
  ExternalPlannerConfig config_;
  mutable std::counting_semaphore<1024> slots_;
};

/// Wire-format request body for the external planner.
std::string planner_request_json(const PlanRequest& request);
/// Parses {api, args}; anything else yields a plan with malformed = true (api kept when readable).
Plan parse_planner_response(std::string_view body);

PlanOutcome run_external_planner(const ExternalPlannerConfig& config, const PlanRequest& request);

struct StageTimings {
  double context_ms = 0.0;
  double tools_ms = 0.0;
  double plan_ms = 0.0;
};

struct PipelineTrace {
  std::string query_id;
  RankedList retrieved_context;
  RankedList retrieved_tools;
  Plan plan;
  StageTimings timings;
  std::optional<std::string> error;
};

struct PipelineArtifacts {
  const ContextIndex* context_index = nullptr;
  const ToolIndex* tool_index = nullptr;
  const LtrModel* ltr_model = nullptr;
  const Planner* planner = nullptr;  // overrides config.planner when set
  Bm25Params bm25;
};

struct PipelineResult {
  std::vector<PipelineTrace> traces;
  std::vector<EvalRecord> records;
  EvalReport report;
};

/// Runs every query of `split` through the configured stages and scores them. Results are
/// in corpus query order regardless of thread count. Throws ConfigError before any query
/// runs when a needed artifact is missing.
PipelineResult run_pipeline(const Corpus& corpus, Split split, const PipelineConfig& config,
                            const PipelineArtifacts& artifacts);

/// One JSON object per trace, timings excluded so equal runs serialize identically.
std::string traces_jsonl(const std::vector<PipelineTrace>& traces);
/// "query_id,context_ms,tools_ms,plan_ms" rows.
std::string timings_csv(const std::vector<PipelineTrace>& traces);

}  // namespace ctrag
