#include <chrono>
#include <regex>

#include <httplib.h>
#include <json.hpp>

#include "ctrag/context_index.hpp"
#include "ctrag/errors.hpp"
#include "ctrag/pipeline.hpp"

namespace ctrag {

using nlohmann::json;

std::string planner_request_json(const PlanRequest& request) {
  json context = json::array();
  for (const auto* item : request.context) context.push_back({{"title", item->title}, {"body", item->body}});
  json tools = json::array();
  for (const auto& entry : request.tools) {
    const Tool* tool = nullptr;
    if (request.toolbox) {
      for (const auto& t : *request.toolbox) {
        if (t.name == entry.item_id) tool = &t;
      }
    }
    json params = json::array();
    std::string description;
    if (tool) {
      description = tool->description;
      for (const auto& p : tool->params) {
        params.push_back({{"name", p.name}, {"description", p.description}, {"required", p.required}});
      }
    }
    tools.push_back({{"name", entry.item_id}, {"description", description}, {"params", params}});
  }
  return json{{"query", request.query ? request.query->text : ""}, {"context", context}, {"tools", tools}}.dump();
}

Plan parse_planner_response(std::string_view body) {
  Plan malformed{"", {}, true};
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception&) {
    return malformed;
  }
  if (!j.is_object()) return malformed;
  if (j.contains("api") && j["api"].is_string()) malformed.api = j["api"].get<std::string>();
  if (malformed.api.empty() || !j.contains("args") || !j["args"].is_object()) return malformed;
  Plan plan{malformed.api, {}, false};
  for (const auto& [key, value] : j["args"].items()) {
    if (value.is_string()) plan.args[key] = value.get<std::string>();
    else if (value.is_number() || value.is_boolean()) plan.args[key] = value.dump();
    else return malformed;
  }
  return plan;
}

namespace {

struct Endpoint {
  std::string origin;  // scheme://host:port
  std::string path;
};

Endpoint parse_endpoint(const std::string& url) {
  static const std::regex re(R"(^(http://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ConfigError("bad planner URL " + url);
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

}  // namespace

PlanOutcome run_external_planner(const ExternalPlannerConfig& config, const PlanRequest& request) {
  const Endpoint endpoint = parse_endpoint(config.url);
  httplib::Client client(endpoint.origin);
  const auto timeout = std::chrono::milliseconds(config.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  auto res = client.Post(endpoint.path, planner_request_json(request), "application/json");
  if (!res) {
    return {Plan{"", {}, true}, "planner request failed: " + httplib::to_string(res.error())};
  }
  if (res->status != 200) {
    return {Plan{"", {}, true}, "planner returned HTTP " + std::to_string(res->status)};
  }
  return {parse_planner_response(res->body), std::nullopt};
}

ExternalPlanner::ExternalPlanner(ExternalPlannerConfig config)
    : config_(std::move(config)), slots_(std::clamp(config_.concurrency, 1, 1024)) {
  parse_endpoint(config_.url);
}

PlanOutcome ExternalPlanner::plan(const PlanRequest& request) const {
  slots_.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{slots_};
  return run_external_planner(config_, request);
}

}  // namespace ctrag
