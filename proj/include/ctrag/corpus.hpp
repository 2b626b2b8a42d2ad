#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctrag/time.hpp"

namespace ctrag {

enum class AppId : std::uint8_t { kMail, kCalendar, kGoogle, kMusic, kReminders, kNotes, kPhonecall };

inline constexpr std::size_t kNumApps = 7;
inline constexpr std::array<AppId, kNumApps> kAllApps = {
    AppId::kMail,      AppId::kCalendar, AppId::kGoogle,   AppId::kMusic,
    AppId::kReminders, AppId::kNotes,    AppId::kPhonecall};

std::string_view app_name(AppId app);
std::optional<AppId> parse_app(std::string_view name);
inline std::size_t app_index(AppId app) { return static_cast<std::size_t>(app); }

struct Persona {
  std::string id;
  std::map<std::string, std::string> attributes;
  std::map<AppId, double> app_usage_profile;  // sums to 1

  double usage_weight(AppId app) const;
  bool operator==(const Persona&) const = default;
};

struct ContextItem {
  std::string id;
  AppId app = AppId::kMail;
  std::string title;
  std::string body;
  Timestamp timestamp{};
  std::map<std::string, std::string> categorical_tags;
  std::int64_t access_count = 0;

  bool operator==(const ContextItem&) const = default;
};

struct ContextStore {
  std::string persona_id;
  AppId app = AppId::kMail;
  std::vector<ContextItem> items;

  bool operator==(const ContextStore&) const = default;
};

struct ToolParam {
  std::string name;
  std::string description;
  bool required = true;

  bool operator==(const ToolParam&) const = default;
};

struct Tool {
  std::string name;
  AppId app = AppId::kMail;
  std::string description;
  std::vector<ToolParam> params;

  bool operator==(const Tool&) const = default;
};

struct Plan {
  std::string api;
  std::map<std::string, std::string> args;
  // Set when an upstream planner produced something that could not be parsed.
  bool malformed = false;

  bool operator==(const Plan&) const = default;
};

/// `{"api":...,"args":{...}}` with keys in lexicographic order, no whitespace.
std::string canonical_plan_string(const Plan& plan);

enum class Split : std::uint8_t { kTrain, kTest };
std::string_view split_name(Split split);
std::optional<Split> parse_split(std::string_view name);

struct LabeledQuery {
  std::string id;
  std::string persona_id;
  std::string text;
  Timestamp timestamp{};
  std::vector<std::string> gold_context_ids;
  std::vector<std::string> gold_tools;
  Plan gold_plan;
  Split split = Split::kTrain;

  bool operator==(const LabeledQuery&) const = default;
};

struct Corpus {
  std::vector<Persona> personas;
  std::vector<ContextStore> stores;  // grouped by persona in persona order, apps in AppId order
  std::vector<Tool> toolbox;
  std::vector<LabeledQuery> queries;

  bool operator==(const Corpus&) const = default;
};

/// Read-only lookup tables over a corpus. The corpus must outlive the view.
class CorpusView {
 public:
  explicit CorpusView(const Corpus& corpus);

  const Corpus& corpus() const { return *corpus_; }
  const Persona* persona(std::string_view id) const;
  std::vector<const ContextStore*> stores_of(std::string_view persona_id) const;
  const ContextItem* item(std::string_view item_id) const;
  const Tool* tool(std::string_view name) const;
  std::vector<const LabeledQuery*> queries(Split split) const;

 private:
  const Corpus* corpus_;
  std::unordered_map<std::string, std::size_t> persona_index_;
  std::unordered_map<std::string, std::vector<std::size_t>> stores_by_persona_;
  std::unordered_map<std::string, const ContextItem*> items_;
  std::unordered_map<std::string, const Tool*> tools_;
};

struct GeneratorConfig {
  std::uint64_t seed = 7;
  int n_personas = 791;
  Timestamp epoch_start{};  // end of the context window ("now" for the synthetic users)
  int window_days = 15;
};

/// Deterministic synthetic corpus. Throws ConfigError on n_personas < 1 or a
/// non-positive window.
Corpus generate_corpus(const GeneratorConfig& config);

/// The fixed 59-API toolbox.
std::vector<Tool> default_toolbox();

/// Per-app mean context items the generator targets.
double target_mean_items(AppId app);

struct Violation {
  std::string entity_id;
  std::string invariant;
};

std::vector<Violation> validate_corpus(const Corpus& corpus);

/// Line-delimited JSON dataset directory (personas, context_items, toolbox, queries).
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus load_corpus(const std::filesystem::path& dir);

inline constexpr std::array<std::string_view, 4> kDatasetFiles = {
    "personas.jsonl", "context_items.jsonl", "toolbox.jsonl", "queries.jsonl"};

}  // namespace ctrag
