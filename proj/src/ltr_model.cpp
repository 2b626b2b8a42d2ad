#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <stdexcept>

#include <json.hpp>

#include "ctrag/errors.hpp"
#include "ctrag/ltr.hpp"

namespace ctrag {

using nlohmann::json;

inline constexpr const char* kModelFormat = "ctrag-lambdamart";
inline constexpr int kModelVersion = 1;

double LtrModel::predict(const FeatureVector& x) const {
  double sum = 0.0;
  for (const auto& tree : trees) sum += tree.predict(x);
  return base_score + learning_rate * sum;
}

std::vector<double> predict(const LtrModel& model, const std::vector<FeatureVector>& rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& x : rows) out.push_back(model.predict(x));
  return out;
}

RankedList rank(const LtrModel& model, const std::vector<RankCandidate>& candidates) {
  std::vector<RankedEntry> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates) scored.push_back({c.item_id, model.predict(c.features)});
  return RankedList::from_scores(std::move(scored), scored.size());
}

namespace {

void write_nodes(const RegressionTree& tree, json& out) {
  out = json::array();
  for (const auto& node : tree.nodes) {
    if (node.is_leaf()) out.push_back({{"v", node.value}});
    else out.push_back({{"f", node.feature}, {"t", node.threshold}});
  }
}

}  // namespace

void save_model(const LtrModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file " + path.string());
  json header = {{"format", kModelFormat},
                 {"version", kModelVersion},
                 {"feature_schema", model.feature_schema},
                 {"schema_hash", schema_hash(model.feature_schema)},
                 {"sigma", model.sigma},
                 {"learning_rate", model.learning_rate},
                 {"base_score", model.base_score},
                 {"n_trees", model.trees.size()}};
  out << header.dump() << '\n';
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    json nodes;
    write_nodes(model.trees[t], nodes);
    out << json{{"tree", t}, {"nodes", nodes}}.dump() << '\n';
  }
  if (!out) throw std::runtime_error("failed writing model file " + path.string());
}

LtrModel load_model(const std::filesystem::path& path, const std::vector<std::string>& expected_schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelLoadError("cannot open model file " + path.string());
  const std::string file = path.string();
  std::size_t line_no = 0;
  std::string line;

  auto parse_line = [&](const char* what) {
    if (!std::getline(in, line)) throw ParseError(file, line_no + 1, what, "unexpected end of file");
    ++line_no;
    try {
      return json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(file, line_no, what, e.what());
    }
  };
  auto field = [&](const json& obj, const char* name) -> const json& {
    if (!obj.is_object() || !obj.contains(name)) throw ParseError(file, line_no, name, "missing field");
    return obj.at(name);
  };
  auto finite_number = [&](const json& obj, const char* name) {
    const json& v = field(obj, name);
    if (!v.is_number() || !std::isfinite(v.get<double>())) throw ParseError(file, line_no, name, "not a finite number");
    return v.get<double>();
  };

  const json header = parse_line("header");
  if (!field(header, "format").is_string() || header["format"] != kModelFormat) {
    throw ParseError(file, line_no, "format", "not a ctrag model");
  }
  if (field(header, "version") != kModelVersion) throw ModelLoadError("unsupported model version in " + file);

  LtrModel model;
  try {
    model.feature_schema = field(header, "feature_schema").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ParseError(file, line_no, "feature_schema", e.what());
  }
  const json& stored_hash = field(header, "schema_hash");
  if (!stored_hash.is_string() || stored_hash.get<std::string>() != schema_hash(model.feature_schema)) {
    throw ModelLoadError("schema hash does not match stored schema in " + file);
  }
  if (model.feature_schema != expected_schema) {
    throw ModelLoadError("feature schema mismatch: model " + stored_hash.get<std::string>() + ", expected " +
                         schema_hash(expected_schema));
  }
  model.sigma = finite_number(header, "sigma");
  model.learning_rate = finite_number(header, "learning_rate");
  model.base_score = finite_number(header, "base_score");
  const json& n_trees = field(header, "n_trees");
  if (!n_trees.is_number_unsigned()) throw ParseError(file, line_no, "n_trees", "not a count");

  const std::size_t n_features = model.feature_schema.size();
  for (std::size_t t = 0; t < n_trees.get<std::size_t>(); ++t) {
    const json rec = parse_line("tree");
    if (field(rec, "tree") != t) throw ParseError(file, line_no, "tree", "out of order");
    const json& nodes = field(rec, "nodes");
    if (!nodes.is_array() || nodes.empty()) throw ParseError(file, line_no, "nodes", "empty tree");

    RegressionTree tree;
    std::size_t cursor = 0;
    std::function<int()> read = [&]() -> int {
      if (cursor >= nodes.size()) throw ParseError(file, line_no, "nodes", "truncated preorder");
      const json& rec_node = nodes[cursor++];
      const int id = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      if (rec_node.is_object() && rec_node.contains("v")) {
        tree.nodes[static_cast<std::size_t>(id)].value = finite_number(rec_node, "v");
        return id;
      }
      const json& f = field(rec_node, "f");
      if (!f.is_number_integer() || f.get<long long>() < 0 || f.get<std::size_t>() >= n_features) {
        throw ParseError(file, line_no, "f", "feature index out of range");
      }
      tree.nodes[static_cast<std::size_t>(id)].feature = f.get<int>();
      tree.nodes[static_cast<std::size_t>(id)].threshold = finite_number(rec_node, "t");
      const int left = read();
      const int right = read();
      tree.nodes[static_cast<std::size_t>(id)].left = left;
      tree.nodes[static_cast<std::size_t>(id)].right = right;
      return id;
    };
    read();
    if (cursor != nodes.size()) throw ParseError(file, line_no, "nodes", "trailing nodes");
    model.trees.push_back(std::move(tree));
  }
  if (std::getline(in, line) && !line.empty()) throw ParseError(file, line_no + 1, "tree", "more trees than declared");
  return model;
}

std::string training_log_csv(const TrainResult& result) {
  std::string out = "round,mean_train_ndcg\n";
  char buf[64];
  for (std::size_t r = 0; r < result.round_ndcg.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f\n", r + 1, result.round_ndcg[r]);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "final,%.6f\n", result.final_ndcg);
  out += buf;
  return out;
}

}  // namespace ctrag
