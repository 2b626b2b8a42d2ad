#include "ctrag/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <memory>
#include <set>
#include <sstream>

#include "ctrag/context_index.hpp"
#include "ctrag/corpus.hpp"
#include "ctrag/errors.hpp"
#include "ctrag/ltr.hpp"
#include "ctrag/manifest.hpp"
#include "ctrag/parallel.hpp"
#include "ctrag/pipeline.hpp"
#include "ctrag/report.hpp"
#include "ctrag/time.hpp"

namespace ctrag::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::size_t> parse_k_list(const std::string& text) {
  std::set<std::size_t> ks;
  std::stringstream ss(text);
  std::string part;
  auto number = [&](const std::string& s) {
    std::size_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || v == 0) {
      throw ConfigError("bad K value '" + s + "' in '" + text + "'");
    }
    return v;
  };
  while (std::getline(ss, part, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      ks.insert(number(part));
      continue;
    }
    const std::size_t lo = number(part.substr(0, dots));
    const std::size_t hi = number(part.substr(dots + 2));
    if (lo > hi) throw ConfigError("empty K range '" + part + "'");
    for (std::size_t k = lo; k <= hi; ++k) ks.insert(k);
  }
  if (ks.empty()) throw ConfigError("no K values given");
  return {ks.begin(), ks.end()};
}

namespace {

std::string now_rfc3339() {
  return format_rfc3339(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

// Effective value of every option of a subcommand, as the user would have typed it.
json config_snapshot(const CLI::App& sub) {
  json snap = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      std::string joined;
      for (std::size_t i = 0; i < results.size(); ++i) joined += (i ? "," : "") + results[i];
      snap[name] = joined;
    } else {
      snap[name] = opt->get_default_str();
    }
  }
  return snap;
}

struct Common {
  std::string dataset;
  std::string out;
  std::uint64_t seed = 7;
  int threads = 1;
};

void add_common(CLI::App* sub, Common& c, bool needs_dataset) {
  auto* ds = sub->add_option("--dataset", c.dataset, "Dataset directory");
  if (needs_dataset) ds->required()->check(CLI::ExistingDirectory);
  sub->add_option("--out", c.out, "Output directory")->required();
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
}

void prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
}

struct GenDataOptions {
  int n_personas = 791;
  std::string epoch_start = "2023-12-07T11:18:19Z";
  int window_days = 15;
};

int cmd_gen_data(const Common& c, const GenDataOptions& o, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  const std::string started = now_rfc3339();
  GeneratorConfig gc;
  gc.seed = c.seed;
  gc.n_personas = o.n_personas;
  gc.window_days = o.window_days;
  const auto epoch = parse_rfc3339(o.epoch_start);
  if (!epoch) throw ConfigError("bad --epoch-start '" + o.epoch_start + "'");
  gc.epoch_start = *epoch;
  const Corpus corpus = generate_corpus(gc);
  const auto violations = validate_corpus(corpus);
  if (!violations.empty()) {
    for (const auto& v : violations) err << "invalid " << v.entity_id << ": " << v.invariant << "\n";
    return kExitFailure;
  }
  prepare_out(c.out);
  save_corpus(corpus, c.out);
  RunManifest m;
  m.command = "gen-data";
  m.config = config_snapshot(sub);
  m.corpus_hash = dataset_hash(c.out);
  for (auto name : kDatasetFiles) m.artifacts[std::string(name)] = "";
  m.started_at = started;
  m.finished_at = now_rfc3339();
  write_manifest(c.out, m);
  std::size_t items = 0;
  for (const auto& s : corpus.stores) items += s.items.size();
  out << "wrote " << corpus.personas.size() << " personas, " << items << " context items, " << corpus.queries.size()
      << " queries to " << c.out << "\n";
  return kExitOk;
}

struct TrainOptions {
  std::size_t n_trees = 300;
  double learning_rate = 0.1;
  double sigma = 1.0;
  std::size_t max_leaves = 31;
  std::size_t min_samples_leaf = 0;
  std::size_t ndcg_cutoff = 10;
  std::size_t embedding_dims = kDefaultEmbeddingDims;
};

Corpus load_checked(const std::string& dir) {
  Corpus corpus = load_corpus(dir);
  const auto violations = validate_corpus(corpus);
  if (!violations.empty()) {
    throw std::runtime_error("dataset " + dir + " is invalid: " + violations.front().entity_id + ": " +
                             violations.front().invariant);
  }
  return corpus;
}

int cmd_train_ltr(const Common& c, const TrainOptions& o, const CLI::App& sub, std::ostream& out) {
  const std::string started = now_rfc3339();
  const Corpus corpus = load_checked(c.dataset);
  const ContextIndex index(corpus, make_context_embedder(corpus, o.embedding_dims));
  const CorpusView view(corpus);
  const auto queries = view.queries(Split::kTrain);
  std::vector<QueryGroup> groups(queries.size());
  parallel_for(queries.size(), c.threads, [&](std::size_t i) { groups[i] = build_query_group(*queries[i], index); });

  TrainConfig tc;
  tc.n_trees = o.n_trees;
  tc.learning_rate = o.learning_rate;
  tc.sigma = o.sigma;
  tc.max_leaves = o.max_leaves;
  tc.min_samples_leaf = o.min_samples_leaf;
  tc.ndcg_cutoff = o.ndcg_cutoff;
  tc.seed = c.seed;
  tc.threads = c.threads;
  const TrainResult result = train(groups, tc);

  prepare_out(c.out);
  save_model(result.model, fs::path(c.out) / "model.jsonl");
  write_file(fs::path(c.out) / "train_log.csv", training_log_csv(result));
  RunManifest m;
  m.command = "train-ltr";
  m.config = config_snapshot(sub);
  m.corpus_hash = dataset_hash(c.dataset);
  m.artifacts = {{"model.jsonl", ""}, {"train_log.csv", ""}};
  m.started_at = started;
  m.finished_at = now_rfc3339();
  write_manifest(c.out, m);
  char buf[160];
  std::snprintf(buf, sizeof buf, "trained %zu trees on %zu groups (%zu rows); train NDCG@%zu %.4f -> %.4f\n",
                result.model.trees.size(), result.trained_groups, result.trained_rows, o.ndcg_cutoff,
                result.round_ndcg.empty() ? result.final_ndcg : result.round_ndcg.front(), result.final_ndcg);
  out << buf;
  return kExitOk;
}

struct EvalOptions {
  std::string stage = "e2e";
  std::string modes = "none,bm25,semantic,ltr-rrf,oracle";
  std::string k = "1,3,5,10";
  std::string model;
  std::string split = "test";
  std::string fusion_mode = "fuse-rankers";
  double rrf_k = 60.0;
  std::size_t k_context = 5;
  std::size_t k_tools = 3;
  std::string planner = "mock";
  std::string planner_url;
  int planner_timeout_ms = 30000;
  int planner_concurrency = 4;
  std::string augmenter = "identity";
  std::string tool_mode = "retrieve";
  std::size_t embedding_dims = kDefaultEmbeddingDims;
};

template <typename T>
T parse_or_throw(std::optional<T> v, const std::string& what, const std::string& value) {
  if (!v) throw ConfigError("unknown " + what + " '" + value + "'");
  return *v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

int cmd_eval(const Common& c, const EvalOptions& o, const CLI::App& sub, std::ostream& out) {
  const std::string started = now_rfc3339();
  PipelineConfig base;
  base.last_stage = parse_or_throw(parse_stage(o.stage), "stage", o.stage);
  base.ks = parse_k_list(o.k);
  base.fusion.mode = parse_or_throw(parse_fusion_mode(o.fusion_mode), "fusion mode", o.fusion_mode);
  base.fusion.rrf_k = o.rrf_k;
  base.k_context = o.k_context;
  base.k_tools = o.k_tools;
  base.planner = parse_or_throw(parse_planner(o.planner), "planner", o.planner);
  base.external = {o.planner_url, o.planner_timeout_ms, o.planner_concurrency};
  base.augmenter = parse_or_throw(parse_augmenter(o.augmenter), "augmenter", o.augmenter);
  base.tool_mode = parse_or_throw(parse_tool_mode(o.tool_mode), "tool mode", o.tool_mode);
  base.threads = c.threads;
  const Split split = parse_or_throw(parse_split(o.split), "split", o.split);

  std::vector<std::pair<std::string, PipelineConfig>> runs;
  for (const auto& mode : split_list(o.modes)) {
    PipelineConfig cfg = base;
    if (std::find(kPresetNames.begin(), kPresetNames.end(), mode) != kPresetNames.end()) {
      const PipelineConfig preset = pipeline_preset(mode);
      cfg.context_mode = preset.context_mode;
      cfg.tool_mode = preset.tool_mode;
    } else {
      cfg.context_mode = parse_or_throw(parse_context_mode(mode), "mode", mode);
    }
    if (base.last_stage == Stage::kContext && cfg.context_mode == ContextMode::kNone) {
      throw ConfigError("mode none has no context stage to evaluate");
    }
    validate_pipeline_config(cfg);
    runs.emplace_back(mode, cfg);
  }
  if (runs.empty()) throw ConfigError("no modes given");

  bool need_index = false, need_model = false, need_tools = false;
  for (const auto& [name, cfg] : runs) {
    need_index |= cfg.context_mode == ContextMode::kBm25 || cfg.context_mode == ContextMode::kSemantic ||
                  cfg.context_mode == ContextMode::kLtrRrf;
    need_model |= cfg.context_mode == ContextMode::kLtrRrf;
    need_tools |= cfg.last_stage != Stage::kContext && cfg.tool_mode == ToolMode::kRetrieve;
  }
  if (need_model && o.model.empty()) throw ConfigError("mode ltr-rrf needs --model");
  if (need_model && !fs::exists(o.model)) throw ConfigError("model file not found: " + o.model);

  const Corpus corpus = load_checked(c.dataset);
  std::optional<LtrModel> model;
  if (need_model) {
    const fs::path model_dir = fs::path(o.model).parent_path();
    if (fs::exists(model_dir / kManifestFile)) {
      const RunManifest trained = read_manifest(model_dir);
      const auto dims = trained.config.find("embedding-dims");
      if (dims != trained.config.end() && dims->get<std::string>() != std::to_string(o.embedding_dims)) {
        throw ConfigError("model was trained with --embedding-dims " + dims->get<std::string>());
      }
    }
    model = load_model(o.model);
  }
  std::unique_ptr<ContextIndex> context_index;
  if (need_index) context_index = std::make_unique<ContextIndex>(corpus, make_context_embedder(corpus, o.embedding_dims));
  std::unique_ptr<ToolIndex> tool_index;
  if (need_tools) tool_index = std::make_unique<ToolIndex>(corpus.toolbox, o.embedding_dims);

  PipelineArtifacts artifacts;
  artifacts.context_index = context_index.get();
  artifacts.tool_index = tool_index.get();
  artifacts.ltr_model = model ? &*model : nullptr;

  prepare_out(c.out);
  RunManifest m;
  m.command = "eval";
  m.config = config_snapshot(sub);
  m.corpus_hash = dataset_hash(c.dataset);
  std::vector<ReportRow> rows;
  std::size_t errors = 0;
  for (const auto& [name, cfg] : runs) {
    const PipelineResult result = run_pipeline(corpus, split, cfg, artifacts);
    for (const auto& t : result.traces) errors += t.error.has_value();
    auto r = report_rows(o.stage, name, result.report);
    rows.insert(rows.end(), r.begin(), r.end());
    const std::string traces = "traces_" + name + ".jsonl";
    write_file(fs::path(c.out) / traces, traces_jsonl(result.traces));
    write_file(fs::path(c.out) / ("timings_" + name + ".csv"), timings_csv(result.traces));
    m.artifacts[traces] = "";
  }
  write_file(fs::path(c.out) / "report.csv", to_csv(rows));
  const std::string table = render_tables(rows);
  write_file(fs::path(c.out) / "report.txt", table);
  m.artifacts["report.csv"] = "";
  m.artifacts["report.txt"] = "";
  m.started_at = started;
  m.finished_at = now_rfc3339();
  write_manifest(c.out, m);
  out << table;
  if (errors) out << errors << " queries hit planner errors (scored incorrect)\n";
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir, const CLI::App& sub,
               std::ostream& out) {
  const std::string started = now_rfc3339();
  std::string corpus_hash;
  std::vector<std::vector<ReportRow>> runs;
  for (const auto& dir : run_dirs) {
    const RunManifest m = read_manifest(dir);
    if (corpus_hash.empty()) corpus_hash = m.corpus_hash;
    if (m.corpus_hash != corpus_hash) {
      throw ReportError("run " + dir + " used corpus " + m.corpus_hash + ", expected " + corpus_hash);
    }
    runs.push_back(parse_report_csv(read_file(fs::path(dir) / "report.csv")));
  }
  const auto merged = merge_rows(runs);
  prepare_out(out_dir);
  write_file(fs::path(out_dir) / "report.csv", to_csv(merged));
  const std::string table = render_tables(merged);
  write_file(fs::path(out_dir) / "report.txt", table);
  RunManifest m;
  m.command = "report";
  m.config = config_snapshot(sub);
  m.corpus_hash = corpus_hash;
  m.artifacts = {{"report.csv", ""}, {"report.txt", ""}};
  m.started_at = started;
  m.finished_at = now_rfc3339();
  write_manifest(out_dir, m);
  out << table;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Context-tuned retrieval and planning benchmark", "ctrag"};
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "TOML/INI file with option values; flags take precedence");
  app.option_defaults()->always_capture_default();

  Common common;
  GenDataOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  add_common(gen_cmd, common, false);
  gen_cmd->add_option("--n-personas", gen.n_personas, "Number of personas")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--epoch-start", gen.epoch_start, "End of the context window (RFC 3339)");
  gen_cmd->add_option("--window-days", gen.window_days, "Length of the context window in days")
      ->check(CLI::PositiveNumber);

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train-ltr", "Train the LambdaMART context ranker");
  add_common(train_cmd, common, true);
  train_cmd->add_option("--n-trees", tr.n_trees, "Boosting rounds");
  train_cmd->add_option("--learning-rate", tr.learning_rate, "Shrinkage")->check(CLI::PositiveNumber);
  train_cmd->add_option("--sigma", tr.sigma, "LambdaRank sigma")->check(CLI::PositiveNumber);
  train_cmd->add_option("--max-leaves", tr.max_leaves, "Leaves per tree")->check(CLI::PositiveNumber);
  train_cmd->add_option("--min-samples-leaf", tr.min_samples_leaf, "Rows per leaf (0 = max(20, 1% of rows))");
  train_cmd->add_option("--ndcg-cutoff", tr.ndcg_cutoff, "NDCG truncation")->check(CLI::PositiveNumber);
  train_cmd->add_option("--embedding-dims", tr.embedding_dims, "Hashed embedding width (power of two)");

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate retrieval and planning");
  add_common(eval_cmd, common, true);
  eval_cmd->add_option("--stage", ev.stage, "context | tools | e2e");
  eval_cmd->add_option("--modes", ev.modes, "Comma list of context modes or presets");
  eval_cmd->add_option("--k", ev.k, "Cutoffs, e.g. 3,5,10 or 1..10");
  eval_cmd->add_option("--model", ev.model, "Model file from train-ltr");
  eval_cmd->add_option("--split", ev.split, "train | test");
  eval_cmd->add_option("--fusion-mode", ev.fusion_mode, "fuse-stores | fuse-rankers");
  eval_cmd->add_option("--rrf-k", ev.rrf_k, "RRF constant")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--k-context", ev.k_context, "Context items handed to later stages")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--k-tools", ev.k_tools, "Tools handed to the planner")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--planner", ev.planner, "mock | external");
  eval_cmd->add_option("--planner-url", ev.planner_url, "External planner endpoint");
  eval_cmd->add_option("--planner-timeout-ms", ev.planner_timeout_ms, "Per-call timeout")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--planner-concurrency", ev.planner_concurrency, "Concurrent planner calls")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--augmenter", ev.augmenter, "identity | hint");
  eval_cmd->add_option("--tool-mode", ev.tool_mode, "retrieve | oracle | all");
  eval_cmd->add_option("--embedding-dims", ev.embedding_dims, "Hashed embedding width (power of two)");

  std::vector<std::string> run_dirs;
  std::string report_out;
  auto* report_cmd = app.add_subcommand("report", "Merge evaluation runs");
  report_cmd->add_option("runs", run_dirs, "Run directories from eval")->required()->check(CLI::ExistingDirectory);
  report_cmd->add_option("--out", report_out, "Output directory")->required();

  std::vector<const char*> argv{"ctrag"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen_data(common, gen, *gen_cmd, out, err);
    if (*train_cmd) return cmd_train_ltr(common, tr, *train_cmd, out);
    if (*eval_cmd) return cmd_eval(common, ev, *eval_cmd, out);
    if (*report_cmd) return cmd_report(run_dirs, report_out, *report_cmd, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace ctrag::cli
