#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ctrag/metrics.hpp"

namespace ctrag {

/// One value of the long-format report. `k` is 0 for metrics without a cutoff.
struct ReportRow {
  std::string stage;  // context | tools | e2e
  std::string mode;
  std::size_t k = 0;
  std::string metric;  // recall | ndcg | tool_recall | plan_acc | exact_match | hallucination
  double value = 0.0;  // percent

  bool operator==(const ReportRow&) const = default;
};

/// Flattens the stages present in `report`.
std::vector<ReportRow> report_rows(std::string_view stage, std::string_view mode, const EvalReport& report);

inline constexpr std::string_view kReportCsvHeader = "stage,mode,k,metric,value";

/// Values printed with two decimals.
std::string to_csv(const std::vector<ReportRow>& rows);
/// Throws ReportError naming the offending line.
std::vector<ReportRow> parse_report_csv(std::string_view text);

/// Concatenates runs keyed by (stage, mode, k, metric). A key seen twice with different
/// values raises ReportError.
std::vector<ReportRow> merge_rows(const std::vector<std::vector<ReportRow>>& runs);

/// Fixed-width tables: context stage as methods x (Recall@K..., NDCG@K...), tools stage as
/// K x modes, e2e as modes x (Plan Acc, Exact Match, Hallucination).
std::string render_tables(const std::vector<ReportRow>& rows);

}  // namespace ctrag
