#include "ctrag/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "ctrag/errors.hpp"

namespace ctrag {

std::vector<ReportRow> report_rows(std::string_view stage, std::string_view mode, const EvalReport& report) {
  std::vector<ReportRow> rows;
  const std::string s(stage), m(mode);
  for (const auto& [k, v] : report.context_recall) rows.push_back({s, m, k, "recall", round2(v)});
  for (const auto& [k, v] : report.context_ndcg) rows.push_back({s, m, k, "ndcg", round2(v)});
  for (const auto& [k, v] : report.tool_recall) rows.push_back({s, m, k, "tool_recall", round2(v)});
  if (report.plan_accuracy) rows.push_back({s, m, 0, "plan_acc", round2(*report.plan_accuracy)});
  if (report.exact_match) rows.push_back({s, m, 0, "exact_match", round2(*report.exact_match)});
  if (report.hallucination) rows.push_back({s, m, 0, "hallucination", round2(*report.hallucination)});
  return rows;
}

std::string to_csv(const std::vector<ReportRow>& rows) {
  std::string out(kReportCsvHeader);
  out += '\n';
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.2f", r.value);
    out += r.stage + "," + r.mode + "," + std::to_string(r.k) + "," + r.metric + "," + buf + "\n";
  }
  return out;
}

std::vector<ReportRow> parse_report_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != kReportCsvHeader) throw ReportError("line 1: expected header '" + std::string(kReportCsvHeader) + "'");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw ReportError("line " + std::to_string(line_no) + ": expected 5 columns");
    ReportRow row{cells[0], cells[1], 0, cells[3], 0.0};
    try {
      std::size_t used = 0;
      row.k = std::stoul(cells[2], &used);
      if (used != cells[2].size()) throw std::invalid_argument("k");
      row.value = std::stod(cells[4], &used);
      if (used != cells[4].size()) throw std::invalid_argument("value");
    } catch (const std::exception&) {
      throw ReportError("line " + std::to_string(line_no) + ": bad number");
    }
    rows.push_back(std::move(row));
  }
  if (line_no == 0) throw ReportError("empty report");
  return rows;
}

std::vector<ReportRow> merge_rows(const std::vector<std::vector<ReportRow>>& runs) {
  std::map<std::tuple<std::string, std::string, std::size_t, std::string>, double> seen;
  std::vector<ReportRow> merged;
  for (const auto& run : runs) {
    for (const auto& r : run) {
      auto [it, inserted] = seen.emplace(std::make_tuple(r.stage, r.mode, r.k, r.metric), r.value);
      if (inserted) {
        merged.push_back(r);
      } else if (it->second != r.value) {
        throw ReportError("conflicting values for " + r.stage + "/" + r.mode + "/" + r.metric + "@" + std::to_string(r.k));
      }
    }
  }
  return merged;
}

namespace {

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}
std::string lpad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}
std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string grid(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& body) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : body) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out += "  ";
      out += c == 0 ? pad(cells[c], width[c]) : lpad(cells[c], width[c]);
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
  for (const auto& row : body) out += line(row);
  return out;
}

}  // namespace

std::string render_tables(const std::vector<ReportRow>& rows) {
  std::vector<std::string> stages;
  for (const auto& r : rows) {
    if (std::find(stages.begin(), stages.end(), r.stage) == stages.end()) stages.push_back(r.stage);
  }
  std::string out;
  for (const auto& stage : stages) {
    std::vector<std::string> modes;
    std::map<std::string, std::set<std::size_t>> ks_by_metric;
    std::map<std::tuple<std::string, std::string, std::size_t>, double> value;
    for (const auto& r : rows) {
      if (r.stage != stage) continue;
      if (std::find(modes.begin(), modes.end(), r.mode) == modes.end()) modes.push_back(r.mode);
      ks_by_metric[r.metric].insert(r.k);
      value[{r.mode, r.metric, r.k}] = r.value;
    }
    auto cell = [&](const std::string& mode, const std::string& metric, std::size_t k) {
      auto it = value.find({mode, metric, k});
      return it == value.end() ? std::string("-") : fixed2(it->second);
    };
    if (!out.empty()) out += "\n";
    out += "[" + stage + "]\n";

    std::vector<std::string> header{"Method"};
    std::vector<std::pair<std::string, std::size_t>> columns;
    for (const char* metric : {"recall", "ndcg"}) {
      for (auto k : ks_by_metric[metric]) {
        header.push_back(std::string(metric == std::string("recall") ? "Recall@" : "NDCG@") + std::to_string(k));
        columns.emplace_back(metric, k);
      }
    }
    if (!columns.empty()) {
      std::vector<std::vector<std::string>> body;
      for (const auto& mode : modes) {
        std::vector<std::string> row{mode};
        for (const auto& [metric, k] : columns) row.push_back(cell(mode, metric, k));
        body.push_back(row);
      }
      out += grid(header, body);
    }

    if (ks_by_metric.count("tool_recall")) {
      if (!columns.empty()) out += "\n";
      std::vector<std::string> th{"K"};
      for (const auto& mode : modes) th.push_back("Tool Recall (" + mode + ")");
      std::vector<std::vector<std::string>> body;
      for (auto k : ks_by_metric["tool_recall"]) {
        std::vector<std::string> row{std::to_string(k)};
        for (const auto& mode : modes) row.push_back(cell(mode, "tool_recall", k));
        body.push_back(row);
      }
      out += grid(th, body);
    }

    if (ks_by_metric.count("plan_acc")) {
      out += "\n";
      std::vector<std::vector<std::string>> body;
      for (const auto& mode : modes) {
        body.push_back({mode, cell(mode, "plan_acc", 0), cell(mode, "exact_match", 0), cell(mode, "hallucination", 0)});
      }
      out += grid({"Setting", "Plan Acc", "Exact Match", "Hallucination"}, body);
    }
  }
  if (!out.empty()) out += "\nRecall divides by the number of gold items, so it can stay below 100 when K is smaller.\n";
  return out;
}

}  // namespace ctrag
