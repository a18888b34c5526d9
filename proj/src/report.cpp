#include "s2c/report.hpp"

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "s2c/errors.hpp"

namespace s2c {

namespace {

const std::vector<std::string>& parse_categories() {
    static const std::vector<std::string> names = {"COUNT_ALL", "NS2", "NS1", "OTHER", "SYNTAX"};
    return names;
}

const std::vector<std::string>& exec_categories() {
    static const std::vector<std::string> names = {"NUM_RES", "VAL", "N4j_EXEC"};
    return names;
}

std::string percent(const std::optional<double>& ratio) {
    if (!ratio) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", *ratio * 100.0);
    return buf;
}

}  // namespace

Report aggregate_metrics(const std::vector<MatchOutcome>& outcomes, long long n,
                         const std::vector<FailureCategory>& parse_failures) {
    if (static_cast<long long>(outcomes.size() + parse_failures.size()) != n)
        throw Error("metrics mismatch: |outcomes| + |parse failures| must equal n");

    Report report;
    report.n = n;
    report.parsed = static_cast<long long>(outcomes.size());
    for (const std::string& cat : parse_categories()) report.errors[cat] = 0;
    for (const std::string& cat : exec_categories()) report.errors[cat] = 0;
    for (const FailureCategory& f : parse_failures) ++report.errors[f.name()];
    for (const MatchOutcome& o : outcomes) {
        if (o.matched())
            ++report.matched;
        else
            ++report.errors[match_outcome_name(o.kind)];
    }
    if (report.parsed > 0)
        report.exec_acc = static_cast<double>(report.matched) / static_cast<double>(report.parsed);
    if (report.n > 0) {
        report.total_acc = static_cast<double>(report.matched) / static_cast<double>(report.n);
        report.parse_err_rate =
            static_cast<double>(parse_failures.size()) / static_cast<double>(report.n);
    }
    return report;
}

nlohmann::json report_to_json(const Report& report) {
    nlohmann::json j;
    j["name"] = report.name;
    j["n"] = report.n;
    j["parsed"] = report.parsed;
    j["matched"] = report.matched;
    j["errors"] = report.errors;
    j["exec_acc"] = report.exec_acc ? nlohmann::json(*report.exec_acc) : nlohmann::json(nullptr);
    j["total_acc"] = report.total_acc ? nlohmann::json(*report.total_acc) : nlohmann::json(nullptr);
    j["parse_err_rate"] =
        report.parse_err_rate ? nlohmann::json(*report.parse_err_rate) : nlohmann::json(nullptr);
    return j;
}

Report report_from_json(const nlohmann::json& j) {
    Report report;
    report.name = j.value("name", "");
    report.n = j.at("n").get<long long>();
    report.parsed = j.at("parsed").get<long long>();
    report.matched = j.at("matched").get<long long>();
    for (auto it = j.at("errors").begin(); it != j.at("errors").end(); ++it)
        report.errors[it.key()] = it.value().get<long long>();
    if (!j.at("exec_acc").is_null()) report.exec_acc = j.at("exec_acc").get<double>();
    if (!j.at("total_acc").is_null()) report.total_acc = j.at("total_acc").get<double>();
    if (!j.at("parse_err_rate").is_null())
        report.parse_err_rate = j.at("parse_err_rate").get<double>();
    return report;
}

namespace {

std::vector<std::pair<std::string, std::vector<std::string>>> report_rows(
    const std::vector<Report>& reports) {
    std::vector<std::pair<std::string, std::vector<std::string>>> rows;
    auto add_row = [&](const std::string& label, auto value_of) {
        std::vector<std::string> cells;
        for (const Report& r : reports) cells.push_back(value_of(r));
        rows.emplace_back(label, std::move(cells));
    };

    add_row("N", [](const Report& r) { return std::to_string(r.n); });
    add_row("parsed (C_all)", [](const Report& r) { return std::to_string(r.parsed); });
    add_row("exec match (M)", [](const Report& r) { return std::to_string(r.matched); });
    for (const std::string& cat : parse_categories())
        add_row(cat, [&cat](const Report& r) {
            auto it = r.errors.find(cat);
            return std::to_string(it == r.errors.end() ? 0 : it->second);
        });
    for (const std::string& cat : exec_categories())
        add_row("err (" + cat + ")", [&cat](const Report& r) {
            auto it = r.errors.find(cat);
            return std::to_string(it == r.errors.end() ? 0 : it->second);
        });
    add_row("err rate", [](const Report& r) { return percent(r.parse_err_rate); });
    add_row("exec acc", [](const Report& r) { return percent(r.exec_acc); });
    add_row("total acc", [](const Report& r) { return percent(r.total_acc); });
    return rows;
}

}  // namespace

std::string render_report_table(const std::vector<Report>& reports) {
    auto rows = report_rows(reports);
    std::size_t label_width = 0;
    for (const auto& [label, cells] : rows) label_width = std::max(label_width, label.size());
    std::vector<std::size_t> widths(reports.size());
    for (std::size_t c = 0; c < reports.size(); ++c) {
        widths[c] = std::max<std::size_t>(reports[c].name.size(), 8);
        for (const auto& [label, cells] : rows) widths[c] = std::max(widths[c], cells[c].size());
    }

    std::string out;
    auto pad = [](const std::string& s, std::size_t w) {
        return s + std::string(w > s.size() ? w - s.size() : 0, ' ');
    };
    out += pad("", label_width);
    for (std::size_t c = 0; c < reports.size(); ++c)
        out += "  " + pad(reports[c].name.empty() ? "report" : reports[c].name, widths[c]);
    out += "\n";
    for (const auto& [label, cells] : rows) {
        out += pad(label, label_width);
        for (std::size_t c = 0; c < cells.size(); ++c) out += "  " + pad(cells[c], widths[c]);
        out += "\n";
    }
    return out;
}

std::string render_report_csv(const std::vector<Report>& reports) {
    std::string out = "metric";
    for (const Report& r : reports) out += "," + (r.name.empty() ? "report" : r.name);
    out += "\n";
    for (const auto& [label, cells] : report_rows(reports)) {
        out += label;
        for (const std::string& cell : cells) out += "," + cell;
        out += "\n";
    }
    return out;
}

}  // namespace s2c
