#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "s2c/classifier.hpp"
#include "s2c/comparator.hpp"

namespace s2c {

/// Aggregated parsing and execution metrics for one evaluation run.
struct Report {
    std::string name;
    long long n = 0;        // total queries
    long long parsed = 0;   // translated without parsing errors
    long long matched = 0;  // execution results matched
    std::map<std::string, long long> errors;  // category name -> count

    std::optional<double> exec_acc;        // matched / parsed
    std::optional<double> total_acc;       // matched / n
    std::optional<double> parse_err_rate;  // parse failures / n
};

/// Counts outcomes and failures into a report; ratios stay unset on division
/// by zero. Requires |outcomes| + |parse_failures| == n.
Report aggregate_metrics(const std::vector<MatchOutcome>& outcomes, long long n,
                         const std::vector<FailureCategory>& parse_failures);

nlohmann::json report_to_json(const Report& report);
Report report_from_json(const nlohmann::json& j);

/// Text table: one row per error category plus the accuracy rows, one
/// column per report.
std::string render_report_table(const std::vector<Report>& reports);

/// Same layout as comma-separated values.
std::string render_report_csv(const std::vector<Report>& reports);

}  // namespace s2c
